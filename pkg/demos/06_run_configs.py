"""
Reproducible experiments from config files
==========================================

Every file under ``configs/`` is validated and run through the same entry
point as ``nhkit run``, and the headline numbers are printed.
"""
import glob
import json
import os

from nhkit import cli

here = os.path.dirname(os.path.abspath(__file__))
for path in sorted(glob.glob(os.path.join(here, "configs", "*.json"))):
    with open(path) as fh:
        cfg = json.load(fh)
    cfg.pop("output", None)
    env = cli.run(cfg)
    scalars = {k: v for k, v in env["summary"].items() if isinstance(v, (int, float, complex))}
    print(f"{os.path.basename(path)} [{env['analysis']}] {len(env['payload']['rows'])} rows")
    for key, value in list(scalars.items())[:4]:
        print(f"    {key} = {value}")
