#!/usr/bin/env python3
"""Build the benchmark CSV files (`f1,...,fn,label`) used by `palms run` and `palms limited`.

Sources are pip-distributed copies of the UCI/KEEL tables so that no direct
access to the original hosts is needed:

  keel-ds   pima, ionosphere, tic-tac-toe, chess (kr-vs-kp), phoneme, new-thyroid1
  Orange3   heart_disease.tab (Cleveland)

Rows are de-duplicated on (features, label). Categorical attributes are encoded
as ordinal integer codes so each attribute stays a single feature. Missing
values (Cleveland only) are replaced by the column median.

Solarflare, Spinal and IBN_Sina have no offline source; pass the original files
with --raw-dir if you have them (see RAW_CONVERTERS below).
"""

import argparse
import csv
import glob
import io
import os
import statistics
import subprocess
import sys
import tempfile
import zipfile

KEEL = {
    # name: (path inside wheel, label -> {0,1})
    "pima": ("keel_ds/data/balanced/raw/pima.dat",
             {"tested_negative": 0, "tested_positive": 1}),
    "ionosphere": ("keel_ds/data/balanced/raw/ionosphere.dat", {"b": 0, "g": 1}),
    "tictactoe": ("keel_ds/data/balanced/raw/tic-tac-toe.dat",
                  {"negative": 0, "positive": 1}),
    "krvskp": ("keel_ds/data/balanced/raw/chess.dat", {"won": 0, "nowin": 1}),
    "phoneme": ("keel_ds/data/balanced/raw/phoneme.dat", {"0": 0, "1": 1}),
    # hyperthyroid vs. rest; the normal/abnormal split is not distributed
    "thyroid": ("keel_ds/data/imbalanced/raw/new-thyroid1.dat",
                {"positive": 0, "negative": 1}),
}

ORDINALS = {
    "tictactoe": {"x": 1.0, "o": -1.0, "b": 0.0},
}


def pip_fetch(package, dest):
    subprocess.run([sys.executable, "-m", "pip", "download", package, "--no-deps",
                    "-q", "-d", dest], check=True)
    wheels = glob.glob(os.path.join(dest, "*.whl"))
    if not wheels:
        raise RuntimeError(f"no wheel downloaded for {package}")
    return zipfile.ZipFile(wheels[0])


def to_number(value, codes):
    try:
        return float(value)
    except ValueError:
        pass
    if value not in codes:
        codes[value] = float(len(codes))
    return codes[value]


def encode(rows, name):
    """rows: list of (raw feature strings, label). Returns numeric rows."""
    n = len(rows[0][0])
    fixed = ORDINALS.get(name)
    # sorted category order per column keeps codes independent of row order
    cats = [sorted({r[0][c] for r in rows if not is_number(r[0][c]) and r[0][c] != "?"})
            for c in range(n)]
    codes = [dict(fixed) if fixed else {v: float(i) for i, v in enumerate(cats[c])}
             for c in range(n)]
    out = []
    for feats, label in rows:
        out.append(([None if v == "?" else to_number(v, codes[c]) for c, v in enumerate(feats)],
                    label))
    for c in range(n):
        present = [r[0][c] for r in out if r[0][c] is not None]
        if len(present) < len(out):
            med = statistics.median(present)
            for r in out:
                if r[0][c] is None:
                    r[0][c] = med
    return out


def is_number(v):
    try:
        float(v)
        return True
    except ValueError:
        return False


def dedup(rows):
    seen = set()
    out = []
    for feats, label in rows:
        key = (tuple(feats), label)
        if key in seen:
            continue
        seen.add(key)
        out.append((feats, label))
    return out


def write_csv(path, rows):
    n = len(rows[0][0])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"f{i + 1}" for i in range(n)] + ["label"])
        for feats, label in rows:
            w.writerow([repr(float(v)) if not float(v).is_integer() else str(int(v))
                        for v in feats] + [label])
    c0 = sum(1 for r in rows if r[1] == 0)
    print(f"{os.path.basename(path)}: {len(rows)} rows, {n} features, "
          f"class0={c0} class1={len(rows) - c0}")


def keel_rows(zf, member, labels):
    text = zf.read(member).decode()
    rows = []
    for rec in csv.reader(io.StringIO(text)):
        if not rec or rec[0].startswith("@"):
            continue
        rec = [x.strip() for x in rec]
        rows.append((rec[:-1], labels[rec[-1]]))
    return rows


def heart_rows(zf):
    text = zf.read("Orange/datasets/heart_disease.tab").decode()
    lines = text.splitlines()[3:]
    rows = []
    for line in lines:
        rec = [x.strip() for x in line.split("\t")]
        if len(rec) < 14:
            continue
        feats = [v if v else "?" for v in rec[:13]]
        # class 1 = no narrowing (164 rows), class 0 = disease present (138 rows)
        rows.append((feats, 1 if rec[13] == "0" else 0))
    return rows


def convert_spinal(path):
    # Kaggle "Dataset_spine.csv": 12 numeric attributes, class Abnormal/Normal
    rows = []
    with open(path) as fh:
        for rec in csv.reader(fh):
            if not rec or not is_number(rec[0]):
                continue
            rows.append((rec[:12], 0 if rec[12].strip() == "Abnormal" else 1))
    return rows


RAW_CONVERTERS = {"spinal": ("Dataset_spine.csv", convert_spinal)}


def main():
    ap = argparse.ArgumentParser(description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", default="data", help="output directory")
    ap.add_argument("--raw-dir", help="directory with original files for extra datasets")
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)

    with tempfile.TemporaryDirectory() as tmp:
        keel = pip_fetch("keel-ds==0.2.5", os.path.join(tmp, "keel"))
        for name, (member, labels) in KEEL.items():
            rows = dedup(encode(keel_rows(keel, member, labels), name))
            write_csv(os.path.join(args.out, f"{name}.csv"), rows)
        orange = pip_fetch("Orange3==3.39.0", os.path.join(tmp, "orange"))
        write_csv(os.path.join(args.out, "heart.csv"),
                  dedup(encode(heart_rows(orange), "heart")))

    if args.raw_dir:
        for name, (fname, conv) in RAW_CONVERTERS.items():
            src = os.path.join(args.raw_dir, fname)
            if os.path.exists(src):
                write_csv(os.path.join(args.out, f"{name}.csv"), dedup(encode(conv(src), name)))
    for missing in ("solarflare", "spinal", "ibn_sina"):
        if not os.path.exists(os.path.join(args.out, f"{missing}.csv")):
            print(f"{missing}: no offline source, skipped")


if __name__ == "__main__":
    main()
