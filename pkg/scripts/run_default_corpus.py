"""Run the shipped corpus and write JSON and CSV reports.

    python3 scripts/run_default_corpus.py --out results/ --jobs 4
"""

import argparse
import pathlib
import sys
from dataclasses import dataclass

from whdet import harness
from whdet.corpus import default_corpus


@dataclass
class Config:
    out: pathlib.Path
    jobs: int = 1
    tol: float | None = None


def main(cfg: Config) -> int:
    corpus = default_corpus()
    if cfg.tol is not None:
        corpus["tol"] = cfg.tol
    report = harness.run(corpus, jobs=cfg.jobs)
    cfg.out.mkdir(parents=True, exist_ok=True)
    (cfg.out / "report.json").write_text(harness.dumps(report) + "\n")
    (cfg.out / "report.csv").write_text(harness.to_csv(report))

    by_id: dict[str, list[int]] = {}
    for e in report["results"]:
        tally = by_id.setdefault(e["report"]["identity"], [0, 0])
        tally[0] += e["status"] == "pass"
        tally[1] += 1
    for ident, (ok, total) in sorted(by_id.items()):
        print(f"{ident:8s} {ok:4d}/{total}")
    s = report["summary"]
    print(f"total {s['pass']}/{s['total']} pass in {report['total_wall_time_s']:.1f}s")
    return harness.exit_code(report)


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out", type=pathlib.Path, default=pathlib.Path("results"))
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--tol", type=float, default=None)
    sys.exit(main(Config(**vars(p.parse_args()))))
