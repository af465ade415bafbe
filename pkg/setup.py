"""Build script: compiles the optional C extension for the tracked-environment sum.

The package works without the extension (a pure-python fallback is selected at
import time), so failures here only cost speed.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
    import numpy

    extensions = cythonize(
        [
            Extension(
                "dephasim._tracked_cy",
                sources=["src/dephasim/_tracked_cy.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except Exception:  # no cython / no compiler: ship pure python
    extensions = []

setup(ext_modules=extensions)
