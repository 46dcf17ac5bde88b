import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python install; sbsbound.kernels falls back
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "sbsbound._ckernels",
                ["src/sbsbound/_ckernels.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
