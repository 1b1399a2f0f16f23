#!/usr/bin/env python3
"""Independent resource ledger for officetwin traces.

Rebuilds, from the JSON-lines trace alone, the interval during which every
device property held each value, then integrates the power profile over those
intervals.  Used two ways:

  ledger_oracle.py ledger TRACE [--profile P]
      print the ledger totals as JSON (values are frozen into the C++ tests)

  ledger_oracle.py check --officetwin BIN --scenario S [--profile P]
      run S and its baseline with BIN, compute the report rows here and
      compare them with `BIN report --format json`
"""
import argparse
import json
import math
import os
import subprocess
import sys
import tempfile

HERE = os.path.dirname(os.path.abspath(__file__))
DEFAULT_PROFILE = os.path.join(HERE, "..", "..", "data", "profile.json")


def spelling(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, float)):
        return repr(v)
    return v


def read_trace(path):
    devices, changes, end = [], [], None
    with open(path) as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            r = json.loads(line)
            if r["type"] == "device":
                devices.append(r)
            elif r["type"] == "change":
                changes.append(r)
            elif r["type"] == "end":
                end = r["t"]
    if end is None:
        raise SystemExit(f"{path}: no end record")
    return devices, changes, end


def intervals(devices, changes, end):
    """(device, property) -> list of (start, stop, value) covering [0, end)."""
    spans = {}
    for d in devices:
        for prop, v in d["values"].items():
            spans[(d["device"], prop)] = [[0.0, None, v]]
    for c in changes:
        seq = spans[(c["device"], c["property"])]
        assert seq[-1][2] == c["old"], f"trace does not chain at t={c['t']}"
        seq[-1][1] = c["t"]
        seq.append([c["t"], None, c["new"]])
    for seq in spans.values():
        seq[-1][1] = end
    return spans


def ledger(path, profile):
    devices, changes, end = read_trace(path)
    kinds = profile["kinds"]
    missing = sorted({d["kind"] for d in devices} - set(kinds))
    if missing:
        raise SystemExit("profile has no entry for: " + ", ".join(missing))
    spans = intervals(devices, changes, end)

    occ_dev = next((d["device"] for d in devices if "Occupancy" in d["values"]), None)
    occupied_spans = [(a, b) for a, b, v in spans.get((occ_dev, "Occupancy"), []) if v > 0]

    def overlap(a, b, spans_):
        return sum(max(0.0, min(b, y) - max(a, x)) for x, y in spans_)

    out = {"duration": end, "energy_wh": 0.0, "comfort_energy_wh": 0.0, "water_l": 0.0,
           "generated_wh": 0.0, "occupied_seconds": sum(b - a for a, b in occupied_spans),
           "unoccupied_on_seconds": 0.0}
    for d in devices:
        k = kinds[d["kind"]]
        energy = water = gen = 0.0
        on_spans = []
        for table, per in (("draw_watts", 3600.0), ("flow_lpm", 60.0)):
            for prop, by_value in sorted(k.get(table, {}).items()):
                seconds = {}
                for a, b, v in spans.get((d["device"], prop), []):
                    key = spelling(v)
                    if key in by_value:
                        seconds[key] = seconds.get(key, 0.0) + (b - a)
                        if by_value[key] > 0:
                            on_spans.append((a, b))
                total = sum(seconds[key] * by_value[key] / per for key in sorted(seconds))
                if table == "draw_watts":
                    energy += total
                else:
                    water += total
        gp = k.get("generation_property", "")
        if gp:
            levels = {}
            for a, b, v in spans.get((d["device"], gp), []):
                levels[v] = levels.get(v, 0.0) + (b - a)
            gen = sum(w * s / 3600.0 for w, s in sorted(levels.items()))
        if k.get("comfort", False):
            on_spans.sort()
            merged = []
            for a, b in on_spans:
                if merged and a <= merged[-1][1]:
                    merged[-1][1] = max(merged[-1][1], b)
                else:
                    merged.append([a, b])
            on_total = sum(b - a for a, b in merged)
            on_occupied = sum(overlap(a, b, occupied_spans) for a, b in merged)
            out["unoccupied_on_seconds"] += on_total - on_occupied
            out["comfort_energy_wh"] += energy
        out["energy_wh"] += energy
        out["water_l"] += water
        out["generated_wh"] += gen
    return out


def report_rows(a, b):
    def share(l):
        return l["generated_wh"] / l["energy_wh"] if l["energy_wh"] > 0 else 0.0

    def imp(l):
        return max(l["energy_wh"] - l["generated_wh"], 0.0) / 1000.0

    def exp(l):
        return max(l["generated_wh"] - l["energy_wh"], 0.0) / 1000.0

    def index(l):
        return l["energy_wh"] / 1000.0 + l["water_l"] / 100.0

    return [
        ("6.4", "water use", b["water_l"], a["water_l"]),
        ("7.1", "solar share of consumption", share(b), share(a)),
        ("7.3", "energy consumed", b["energy_wh"] / 1000.0, a["energy_wh"] / 1000.0),
        ("11.6", "net grid import", imp(b), imp(a)),
        ("11.6", "grid export", exp(b), exp(a)),
        ("12.2", "resource index", index(b), index(a)),
        ("12.5", "waste hours", b["unoccupied_on_seconds"] / 3600.0, a["unoccupied_on_seconds"] / 3600.0),
    ]


def close(x, y):
    return math.isclose(x, y, rel_tol=1e-9, abs_tol=1e-9)


def check(args, profile):
    with tempfile.TemporaryDirectory() as tmp:
        auto = os.path.join(tmp, "auto.jsonl")
        base_scn = os.path.join(tmp, "baseline.json")
        base = os.path.join(tmp, "baseline.jsonl")
        run = lambda *a: subprocess.run([args.officetwin, *a], check=True, capture_output=True, text=True)
        run("run", "--scenario", args.scenario, "--out", auto)
        run("baseline", "--scenario", args.scenario, "--out", base_scn)
        run("run", "--scenario", base_scn, "--out", base)
        got = json.loads(run("report", "--trace", auto, "--baseline-trace", base,
                             "--profile", args.profile, "--format", "json").stdout)
        a, b = ledger(auto, profile), ledger(base, profile)
    failures = 0
    for target, name, want_b, want_a in report_rows(a, b):
        row = next(r for r in got["indicators"] if r["target"] == target and r["indicator"] == name)
        ok = close(row["baseline"], want_b) and close(row["automated"], want_a)
        failures += not ok
        print(f"{'ok  ' if ok else 'FAIL'} {target} {name}: baseline {row['baseline']!r} vs {want_b!r}, "
              f"automated {row['automated']!r} vs {want_a!r}")
    return 1 if failures else 0


def main():
    ap = argparse.ArgumentParser()
    sub = ap.add_subparsers(dest="cmd", required=True)
    p1 = sub.add_parser("ledger")
    p1.add_argument("trace")
    p1.add_argument("--profile", default=DEFAULT_PROFILE)
    p2 = sub.add_parser("check")
    p2.add_argument("--officetwin", required=True)
    p2.add_argument("--scenario", required=True)
    p2.add_argument("--profile", default=DEFAULT_PROFILE)
    args = ap.parse_args()
    with open(args.profile) as f:
        profile = json.load(f)
    if args.cmd == "ledger":
        print(json.dumps(ledger(args.trace, profile), indent=2))
        return 0
    return check(args, profile)


if __name__ == "__main__":
    sys.exit(main())
