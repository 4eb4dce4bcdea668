import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "kwspot.kernels._qkernels",
                ["src/kwspot/kernels/_qkernels.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    # Pure-Python fallback kernels are selected at import time.
    ext_modules = []

setup(ext_modules=ext_modules)
