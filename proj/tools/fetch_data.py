#!/usr/bin/env python3
"""Fetch and preprocess the public benchmark datasets.

Produces CSVs in the layout the harness and the acceptance suite expect:
a header row, a `label` column, numeric feature columns.

    python3 tools/fetch_data.py --dest data            # covertype + warfarin
    python3 tools/fetch_data.py --dest data --only covertype
    python3 tools/fetch_data.py --dest data --warfarin-raw /path/to/iwpc.csv

Covertype comes straight from the UCI archive. The Warfarin (IWPC) clinical
dataset is redistributed by several course repositories; if every mirror is
unreachable, download it manually (see docs/DATA.md) and pass --warfarin-raw.
"""

import argparse
import gzip
import io
import sys
import urllib.request
from pathlib import Path

COVERTYPE_URLS = [
    "https://archive.ics.uci.edu/ml/machine-learning-databases/covtype/covtype.data.gz",
    "https://archive.ics.uci.edu/static/public/31/covertype.zip",
]

WARFARIN_URLS = [
    "https://raw.githubusercontent.com/chuchro3/Warfarin/master/data/warfarin.csv",
    "https://raw.githubusercontent.com/shreyas-marathe/warfarin-dose-prediction/master/data/warfarin.csv",
]


def download(urls):
    last_error = None
    for url in urls:
        try:
            print(f"  fetching {url}")
            with urllib.request.urlopen(url, timeout=120) as resp:
                return url, resp.read()
        except Exception as exc:  # noqa: BLE001 - report and try the next mirror
            print(f"  failed: {exc}")
            last_error = exc
    raise RuntimeError(f"all mirrors failed: {last_error}")


def write_covertype(dest: Path):
    url, blob = download(COVERTYPE_URLS)
    if url.endswith(".zip"):
        import zipfile

        with zipfile.ZipFile(io.BytesIO(blob)) as zf:
            inner = [n for n in zf.namelist() if n.endswith(".gz")]
            blob = zf.read(inner[0])
    text = gzip.decompress(blob).decode()

    out = dest / "covertype.csv"
    with out.open("w") as fh:
        first = text.splitlines()[0]
        n_features = len(first.split(",")) - 1
        fh.write("label," + ",".join(f"f{i}" for i in range(n_features)) + "\n")
        for line in text.splitlines():
            if not line.strip():
                continue
            cells = line.split(",")
            fh.write(cells[-1] + "," + ",".join(cells[:-1]) + "\n")
    print(f"  wrote {out}")


# Raw IWPC column names used for the featurization (docs/DATA.md). Columns
# absent from a particular mirror are skipped.
NUMERIC_COLS = ["Height (cm)", "Weight (kg)", "Age"]
CATEGORICAL_COLS = [
    "Gender",
    "Race",
    "Ethnicity",
    "Diabetes",
    "Congestive Heart Failure and/or Cardiomyopathy",
    "Valve Replacement",
    "Current Smoker",
    "Amiodarone (Cordarone)",
    "Carbamazepine (Tegretol)",
    "Phenytoin (Dilantin)",
    "Rifampin or Rifampicin",
    "Simvastatin (Zocor)",
    "Aspirin",
    "Cyp2C9 genotypes",
    "VKORC1 genotype: -1639 G>A (3673); chr16:31015190; rs9923231; C/T",
    "VKORC1 genotype: 1173 C>T(6484); chr16:31012379; rs9934438; A/G",
    "VKORC1 genotype: 2255C>T (7566); chr16:31011297; rs2359612; A/G",
    "VKORC1 genotype: 1542G>C (6853); chr16:31012010; rs8050894; C/G",
]
DOSE_COL = "Therapeutic Dose of Warfarin"


def age_to_decade(value):
    import pandas as pd

    if pd.isna(value):
        return None
    text = str(value)
    digits = "".join(ch for ch in text if ch.isdigit() or ch == "-")
    try:
        return float(digits.split("-")[0]) / 10.0
    except (ValueError, IndexError):
        return None


def write_warfarin(dest: Path, raw_path):
    import pandas as pd

    if raw_path:
        df = pd.read_csv(raw_path, low_memory=False)
    else:
        _, blob = download(WARFARIN_URLS)
        df = pd.read_csv(io.BytesIO(blob), low_memory=False)

    df = df[df[DOSE_COL].notna()].reset_index(drop=True)
    dose = df[DOSE_COL].astype(float)
    label = pd.cut(dose, bins=[-1, 20.999, 49, 1e9], labels=[0, 1, 2]).astype(int)

    feats = {}
    for col in NUMERIC_COLS:
        if col not in df.columns:
            continue
        if col == "Age":
            series = df[col].map(age_to_decade)
        else:
            series = pd.to_numeric(df[col], errors="coerce")
        feats[f"{col}__missing"] = series.isna().astype(float)
        feats[col] = series.fillna(series.mean()).astype(float)
    for col in CATEGORICAL_COLS:
        if col not in df.columns:
            continue
        series = df[col].fillna("NA").astype(str)
        for value in sorted(series.unique()):
            feats[f"{col}={value}"] = (series == value).astype(float)

    out_df = pd.DataFrame(feats)
    out_df.insert(0, "label", label)
    out = dest / "warfarin.csv"
    # Feature names become f0..fN-1: the harness only needs the label name.
    out_df.columns = ["label"] + [f"f{i}" for i in range(out_df.shape[1] - 1)]
    out_df.to_csv(out, index=False)
    print(f"  wrote {out} ({out_df.shape[0]} events, {out_df.shape[1] - 1} features)")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dest", default="data", type=Path)
    parser.add_argument("--only", choices=["covertype", "warfarin"])
    parser.add_argument("--warfarin-raw", type=Path, default=None,
                        help="local raw IWPC CSV instead of downloading")
    args = parser.parse_args()
    args.dest.mkdir(parents=True, exist_ok=True)

    if args.only in (None, "covertype"):
        print("covertype:")
        write_covertype(args.dest)
    if args.only in (None, "warfarin"):
        print("warfarin:")
        write_warfarin(args.dest, args.warfarin_raw)


if __name__ == "__main__":
    sys.exit(main())
