"""Build script for the optional compiled kernel.

If Cython or a C compiler is missing the package still installs and the
pure-Python kernels are used instead.
"""
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "apar.kernels._ckernels",
                ["src/apar/kernels/_ckernels.pyx"],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
