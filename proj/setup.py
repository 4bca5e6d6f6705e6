"""CMake-driven build of the endocapm extension module.

`pip install . --no-build-isolation` configures the C++ core with CMake,
builds only the pybind11 target and drops the extension next to the pure
python package shim.
"""

import os
import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name: str) -> None:
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    def build_extension(self, ext: CMakeExtension) -> None:
        source_dir = Path(__file__).resolve().parent
        ext_path = Path(self.get_ext_fullpath(ext.name)).resolve()
        package_dir = ext_path.parent
        build_dir = Path(self.build_temp).resolve()
        build_dir.mkdir(parents=True, exist_ok=True)

        configure = [
            "cmake",
            str(source_dir),
            "-DCMAKE_BUILD_TYPE=Release",
            "-DENDOCAPM_BUILD_TESTS=OFF",
            "-DENDOCAPM_BUILD_CLI=OFF",
            f"-DENDOCAPM_PYTHON_OUTPUT={package_dir}",
            f"-DPYTHON_EXECUTABLE={sys.executable}",
        ]
        subprocess.run(configure, cwd=build_dir, check=True)
        jobs = str(os.cpu_count() or 2)
        subprocess.run(
            ["cmake", "--build", ".", "--target", "endocapm_python", "-j", jobs],
            cwd=build_dir,
            check=True,
        )


setup(
    packages=["endocapm"],
    package_dir={"endocapm": "python/endocapm"},
    ext_modules=[CMakeExtension("endocapm._endocapm")],
    cmdclass={"build_ext": CMakeBuild},
    zip_safe=False,
)
