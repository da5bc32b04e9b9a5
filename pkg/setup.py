"""Build script for the optional Cython GRU kernel.

The package works without the extension (a numpy fallback is selected at
import time), so a failed extension build is downgraded to a warning.
"""

import sys

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "clozegen.readers.kernels._gru_cy",
                ["src/clozegen/readers/kernels/_gru_cy.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level="3",
    )
except Exception as exc:  # pragma: no cover
    print(f"warning: skipping Cython GRU kernel build ({exc}); "
          "pure-Python fallback will be used", file=sys.stderr)

setup(ext_modules=ext_modules)
