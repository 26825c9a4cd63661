import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [Extension("magcap._core", ["src/magcap/_core.pyx"],
                   include_dirs=[np.get_include()])],
        compiler_directives={"language_level": "3", "boundscheck": False,
                             "wraparound": False, "cdivision": True},
    )
except ImportError:
    # pure-Python fallback in magcap/_core_py.py is used instead
    extensions = []

setup(ext_modules=extensions)
