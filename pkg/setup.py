"""Build script for the optional compiled kernels.

The package is fully functional without a C compiler: the extensions are
marked optional and `soilres.kernels` falls back to the pure numpy
implementations when the compiled modules are absent.  Set SOILRES_NO_EXT=1
to skip the extension build entirely.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("SOILRES_NO_EXT") != "1":
    try:
        import numpy
        from Cython.Build import cythonize

        extensions = [
            Extension(
                "soilres._ann_fast",
                ["src/soilres/_ann_fast.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                optional=True,
            ),
            Extension(
                "soilres._mars_fast",
                ["src/soilres/_mars_fast.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                optional=True,
            ),
        ]
        ext_modules = cythonize(extensions, language_level=3)
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
