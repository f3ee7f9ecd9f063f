from setuptools import Extension, setup

# The compiled kernel is optional: if Cython (or a C compiler) is missing,
# the package falls back to the pure-Python twin in cohomlab._kernel.pure.
try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "cohomlab._kernel._speedups",
                ["src/cohomlab/_kernel/_speedups.pyx"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
