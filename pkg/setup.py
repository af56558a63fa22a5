"""Build script for the optional compiled kernel.

The package works without the extension (a numpy-backed fallback is selected
at import time); the extension only accelerates the hot kernels.  Build it
in place for development with:

    python setup.py build_ext --inplace
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext = Extension(
        "flatmap.kernels._core",
        ["src/flatmap/kernels/_core.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O2"],
    )
    ext.optional = True  # missing compiler must not break installation
    ext_modules = cythonize([ext], compiler_directives={"language_level": "3"})
except ImportError:
    pass

setup(ext_modules=ext_modules)
