#!/usr/bin/env python3
"""Convert raw corpus files into the text<TAB>label TSV the lid tool reads.

Input formats:
  tsv   tab separated, one sample per line (the DSL task distribution format)
  csv   comma separated, optionally with a header row

Columns default to text first, label second; override with --text-col and
--label-col (indices, or header names together with --header for csv).

--truncate cuts each text at the last word boundary at or before --max-len
code points when that keeps at least --min-len code points, else hard at
--max-len, mirroring the library's truncate_short. (Boundary detection uses
Python's str.isspace, which agrees with the library on ASCII whitespace.)

Tabs and newlines inside text fields are replaced by single spaces so the
output is always well-formed TSV.
"""

import argparse
import csv
import sys


def truncate_short(text, min_len, max_len):
    if len(text) <= max_len:
        return text
    best = None
    for p in range(1, max_len + 1):
        if not text[p - 1].isspace() and (p == len(text) or text[p].isspace()):
            best = p
    if best is not None and best >= min_len:
        return text[:best]
    return text[:max_len]


def clean_text(text):
    return " ".join(text.replace("\t", " ").split())


def read_tsv(stream):
    for lineno, line in enumerate(stream, 1):
        line = line.rstrip("\r\n")
        if not line:
            continue
        parts = line.split("\t")
        yield lineno, parts


def read_csv(stream, has_header):
    reader = csv.reader(stream)
    rows = enumerate(reader, 1)
    header = None
    if has_header:
        _, header = next(rows, (0, None))
    for lineno, parts in rows:
        if not parts:
            continue
        yield lineno, parts
    read_csv.header = header


def resolve_column(spec, header, path):
    try:
        return int(spec)
    except ValueError:
        pass
    if header is None:
        raise SystemExit(f"{path}: column name '{spec}' needs --header")
    if spec not in header:
        raise SystemExit(f"{path}: no column named '{spec}' in header {header}")
    return header.index(spec)


def main():
    parser = argparse.ArgumentParser(
        description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter
    )
    parser.add_argument("--input", default="-", help="input file, - for stdin")
    parser.add_argument("--out", default="-", help="output TSV, - for stdout")
    parser.add_argument("--format", choices=["tsv", "csv"], default="tsv")
    parser.add_argument("--header", action="store_true",
                        help="csv: first row is a header")
    parser.add_argument("--text-col", default="0",
                        help="text column index or header name")
    parser.add_argument("--label-col", default="1",
                        help="label column index or header name")
    parser.add_argument("--truncate", action="store_true",
                        help="cut texts to the short-text length band")
    parser.add_argument("--min-len", type=int, default=15)
    parser.add_argument("--max-len", type=int, default=20)
    parser.add_argument("--drop-shorter-than", type=int, default=1,
                        help="drop rows whose cleaned text has fewer code points")
    parser.add_argument("--skip-bad", action="store_true",
                        help="skip malformed rows instead of aborting")
    args = parser.parse_args()
    if args.truncate and args.min_len > args.max_len:
        parser.error("--min-len must be <= --max-len")

    instream = sys.stdin if args.input == "-" else open(
        args.input, encoding="utf-8", newline="" if args.format == "csv" else None
    )
    outstream = sys.stdout if args.out == "-" else open(
        args.out, "w", encoding="utf-8"
    )

    if args.format == "csv":
        rows = list(read_csv(instream, args.header))
        header = read_csv.header
    else:
        rows = read_tsv(instream)
        header = None
    text_col = resolve_column(args.text_col, header, args.input)
    label_col = resolve_column(args.label_col, header, args.input)

    written = dropped = bad = 0
    for lineno, parts in rows:
        if len(parts) <= max(text_col, label_col):
            if args.skip_bad:
                bad += 1
                continue
            raise SystemExit(f"{args.input}:{lineno}: expected at least "
                             f"{max(text_col, label_col) + 1} columns, got {len(parts)}")
        text = clean_text(parts[text_col])
        label = parts[label_col].strip().lower()
        if args.truncate:
            text = truncate_short(text, args.min_len, args.max_len)
        if len(text) < args.drop_shorter_than or not text or not label:
            dropped += 1
            continue
        outstream.write(f"{text}\t{label}\n")
        written += 1

    print(f"wrote {written} rows ({dropped} dropped, {bad} malformed skipped)",
          file=sys.stderr)


if __name__ == "__main__":
    main()
