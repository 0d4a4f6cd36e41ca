"""Rewrite the committed case-study logs and behaviors from their seeds."""

from pathlib import Path

from boundmon.casestudy import CASE_NAMES, generate_case_files, load_case

OUT = Path(__file__).resolve().parents[1] / "src" / "boundmon" / "cases"

for name in CASE_NAMES:
    for filename, text in generate_case_files(load_case(name)).items():
        (OUT / filename).write_text(text, encoding="utf-8")
        print("wrote", filename)
