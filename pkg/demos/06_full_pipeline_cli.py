"""Drive the whole pipeline through the CLI on the bundled corpus.

Equivalent shell session:

    diachron detect   --manifest M --catalog C --out out/
    diachron labels   --manifest M --catalog C --out out/
    diachron ensemble --manifest M --catalog C --neural N --out out/
    diachron evaluate --manifest M --catalog C --neural N --gold G --out out/
    diachron trends   --manifest M --catalog C --neural N --out out/
    diachron report   --manifest M --catalog C --neural N --gold G --out out/

Outputs are byte-deterministic; re-running reproduces identical files.
"""

import json
import tempfile
from pathlib import Path

from diachron.cli import main

DATA = Path(__file__).resolve().parents[1] / "src" / "diachron" / "data"
SYNTH = DATA / "synth_corpus"

with tempfile.TemporaryDirectory() as td:
    base = [
        "--manifest", str(SYNTH / "manifest.json"),
        "--catalog", str(SYNTH / "catalog.json"),
        "--out", td,
    ]
    neural = ["--neural", str(SYNTH / "neural_stub.jsonl")]
    gold = ["--gold", str(SYNTH / "gold.json")]

    for argv in (
        ["ingest", "--manifest", str(SYNTH / "manifest.json"), "--out", td],
        ["detect", *base],
        ["labels", *base],
        ["ensemble", *base, *neural],
        ["evaluate", *base, *neural, *gold],
        ["trends", *base, *neural],
        ["report", *base, *neural, *gold],
    ):
        code = main(argv)
        assert code == 0, argv
        print(f"$ diachron {argv[0]} ... -> exit {code}")

    report = json.loads((Path(td) / "report.json").read_text(encoding="utf-8"))
    det = report["detections"]
    print(f"\ndetections over {det['checks']} feature-text checks:")
    print(f"  regex {det['regex']}, neural {det['neural']}, ensemble {det['ensemble']}")
    print(f"agreement rate: {report['agreement']['agreement_rate']:.1%}")
    print(f"gold accuracy:  {report['gold']['accuracy']:.1%}"
          f" (F1 {report['gold']['f1']:.2f},"
          f" ECE {report['gold']['calibration']['ece']:.3f})")
    print("\nartifacts:")
    for p in sorted(Path(td).iterdir()):
        print(f"  {p.name}")
