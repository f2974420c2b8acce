"""Build script for the optional compiled fill kernel.

The package is pure Python except for ``lobeq.kernels._pnl_cy``, a Cython
translation of the event-loop hot path.  The extension is marked optional:
if Cython or a C compiler is unavailable the install still succeeds and the
package falls back to the pure-Python kernel at import time.

For development builds compile in place with::

    python setup.py build_ext --inplace
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pragma: no cover - environment without Cython
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "lobeq.kernels._pnl_cy",
                ["src/lobeq/kernels/_pnl_cy.pyx"],
                optional=True,
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
