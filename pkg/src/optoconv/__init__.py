"""Models and analysis tools for a mechanically mediated microwave-optical converter."""

import os as _os

# cap BLAS threads before numpy loads; only applies if numpy is not imported yet
_threads = _os.environ.get("OPTOCONV_THREADS")
if _threads:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        _os.environ.setdefault(_var, _threads)

from .params import ConverterParams, DampingRates, ParameterError, device_params, low_power_params  # noqa: E402

__all__ = ["ConverterParams", "DampingRates", "ParameterError", "device_params", "low_power_params"]
__version__ = "0.1.0"
