"""Hot numeric kernels.

``PARTHETA_BACKEND=numba`` (default when numba imports) runs the loop
kernels of ``_loops`` compiled with ``njit``; ``PARTHETA_BACKEND=numpy``
runs the vectorised versions in ``_numpy``. Both export the same names.
"""

from . import _loops, _numpy
from ._jit import BACKEND, NUMBA_AVAILABLE

_impl = _loops if BACKEND == "numba" else _numpy

series_sum = _impl.series_sum
series_sum_many = _impl.series_sum_many
newton_ratio = _impl.newton_ratio
aberth = _impl.aberth
theta_star_product = _impl.theta_star_product
# vectorised numpy beats the compiled loop here (complex abs dominates), so both backends share it
theta_star_product_many = _numpy.theta_star_product_many
elementary_symmetric = _impl.elementary_symmetric

__all__ = [
    "BACKEND",
    "NUMBA_AVAILABLE",
    "series_sum",
    "series_sum_many",
    "newton_ratio",
    "aberth",
    "theta_star_product",
    "theta_star_product_many",
    "elementary_symmetric",
]
