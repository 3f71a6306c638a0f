import os
import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    def build_extension(self, ext):
        out = Path(self.get_ext_fullpath(ext.name)).resolve().parent
        build_dir = Path(self.build_temp).resolve()
        build_dir.mkdir(parents=True, exist_ok=True)
        cfg = "Debug" if self.debug else "Release"
        subprocess.run(
            [
                "cmake",
                str(Path(__file__).parent.resolve()),
                f"-DCMAKE_BUILD_TYPE={cfg}",
                f"-DCMAKE_LIBRARY_OUTPUT_DIRECTORY={out}",
                f"-DPython3_EXECUTABLE={sys.executable}",
                "-DSHIFTWALK_BUILD_TESTS=OFF",
            ],
            cwd=build_dir,
            check=True,
        )
        subprocess.run(
            [
                "cmake",
                "--build",
                str(build_dir),
                "--target",
                "_shiftwalk",
                "-j",
                str(os.cpu_count() or 2),
            ],
            check=True,
        )


setup(
    packages=["shiftwalk"],
    package_dir={"shiftwalk": "python/shiftwalk"},
    ext_modules=[CMakeExtension("shiftwalk._shiftwalk")],
    cmdclass={"build_ext": CMakeBuild},
)
