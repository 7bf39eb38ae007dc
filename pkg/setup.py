"""Builds the optional Cython kernels; the package works without them."""
from setuptools import Extension, setup

try:
    import numpy as np
    from Cython.Build import cythonize
except ImportError:  # no toolchain: pure-Python install
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "tropos._kernels",
                ["src/tropos/_kernels.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
