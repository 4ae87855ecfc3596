"""Build the optional compiled core; the package falls back to pure Python
when the extension is unavailable."""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("NEIGHPERC_NO_EXT") != "1":
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [Extension("neighperc._core", ["src/neighperc/_core.pyx"],
                       include_dirs=[numpy.get_include()],
                       define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                       extra_compile_args=["-O3"],
                       optional=True)],
            compiler_directives={"language_level": 3},
        )

setup(ext_modules=ext_modules)
