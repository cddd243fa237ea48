"""Run every bundled preset and report wall time per preset.

    python scripts/run_all_presets.py [output-dir]
"""

import os
import sys
import time

from qwalk import cli


def main():
    if len(sys.argv) > 1:
        os.environ["QWALK_OUT_DIR"] = sys.argv[1]
    status = 0
    for name in cli.PRESETS:
        t0 = time.perf_counter()
        code = cli.main(["preset", name])
        print(f"{name:<11} exit {code}  {time.perf_counter() - t0:6.1f} s")
        status = status or code
    return status


if __name__ == "__main__":
    sys.exit(main())
