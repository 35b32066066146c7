"""Builds the optional Cython kernels; the package still installs without them."""

import platform

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, Cython missing, ...
            print(f"warning: compiled kernels not built ({exc}); using numpy fallback")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: building {ext.name} failed ({exc}); using numpy fallback")


# hardware popcount; without it __builtin_popcountll is a table lookup
_FLAGS = ["-O3"]
if platform.machine().lower() in ("x86_64", "amd64"):
    _FLAGS.append("-mpopcnt")

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "bchsense._kernels._ckernels",
                ["src/bchsense/_kernels/_ckernels.pyx"],
                extra_compile_args=_FLAGS,
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules, cmdclass={"build_ext": OptionalBuildExt})
