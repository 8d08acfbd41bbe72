#!/usr/bin/env python3
"""Build the bundled replication lexicon from a JMdict SQLite database.

Usage: build_replication_lexicon.py JMDICT_DB OUT_TSV

The database is the one shipped by the `jamdict-data` package
(jamdict.db, tables Kana/Sense/pos/KNP/Kanji). Only hiragana readings are
kept. Class assignment:

  ichidan senses only                      -> 2
  godan senses only, -iru/-eru reading     -> 4-1 / 4-2
  godan senses only, anything else         -> 1
  いく                                     -> 4-3
  reading with both godan and ichidan      -> x, polysemous
  する / くる                              -> x

Entries are ranked by JMdict priority tags and the most frequent ones are
taken until each class reaches its target size. Output order is sorted by
class then reading so the file diffs cleanly.
"""

import re
import sqlite3
import sys
from collections import defaultdict

TARGETS = {"1": 2503, "2": 1298, "4-1": 119, "4-2": 37, "4-3": 1}
POLYSEMOUS_SAMPLE = 24

# Words that must be present regardless of rank.
REQUIRED = {
    "かく", "たつ", "のむ", "みる", "たべる", "まじる", "あきれかえる", "いく",
    "ねがえる", "おきる", "まつ", "ほめたたえる", "つっぷす", "はなす",
}

GODAN = {
    "Godan verb with 'u' ending",
    "Godan verb with 'ku' ending",
    "Godan verb with 'gu' ending",
    "Godan verb with 'su' ending",
    "Godan verb with 'tsu' ending",
    "Godan verb with 'nu' ending",
    "Godan verb with 'bu' ending",
    "Godan verb with 'mu' ending",
    "Godan verb with 'ru' ending",
    "Godan verb with 'ru' ending (irregular verb)",
    "Godan verb - -aru special class",
}
ICHIDAN = {"Ichidan verb", "Ichidan verb - kureru special class"}
IKU = "Godan verb - Iku/Yuku special class"
# Classes whose past tense is irregular or which belong to another paradigm.
REJECT = {
    "Godan verb with 'u' ending (special class)",
    "Ichidan verb - zuru verb (alternative form of -jiru verbs)",
    "Kuru verb - special class",
    "suru verb - special class",
    "suru verb - included",
    "su verb - precursor to the modern suru",
    "irregular nu verb",
    "irregular ru verb, plain form ends with -ri",
}

HIRAGANA = re.compile(r"^[ぁ-ゖ]+$")
I_ROW = set("いきぎしじちぢにひびぴみりゐ")
E_ROW = set("えけげせぜてでねへべぺめれゑ")
KANJI = r"[一-鿿々]"
KANA = r"[ぁ-ゖ]"
COMPOUND = re.compile(rf"^{KANJI}+{KANA}+{KANJI}+{KANA}+$")


def rank(tags):
    best = 100
    for t in tags:
        if t in ("ichi1", "news1", "spec1", "gai1"):
            best = min(best, 0)
        elif t in ("ichi2", "news2", "spec2", "gai2"):
            best = min(best, 60)
        elif t.startswith("nf"):
            best = min(best, int(t[2:]))
    return best


def main(db_path, out_path):
    con = sqlite3.connect(db_path)
    classes = defaultdict(set)
    priority = defaultdict(lambda: 100)
    compound = defaultdict(bool)

    kanji_by_entry = defaultdict(list)
    for idseq, text in con.execute("select idseq, text from Kanji"):
        kanji_by_entry[idseq].append(text)

    rows = con.execute(
        """select k.ID, k.idseq, k.text, p.text
           from Kana k join Sense s on s.idseq = k.idseq
           join pos p on p.sid = s.ID"""
    )
    for kid, idseq, reading, pos in rows:
        if not HIRAGANA.match(reading):
            continue
        if pos in GODAN:
            classes[reading].add("godan")
        elif pos in ICHIDAN:
            classes[reading].add("ichidan")
        elif pos == IKU:
            classes[reading].add("iku")
        elif pos in REJECT:
            classes[reading].add("reject")
        else:
            continue
        if any(COMPOUND.match(k) for k in kanji_by_entry[idseq]):
            compound[reading] = True

    for reading, tag in con.execute(
        "select k.text, n.text from Kana k join KNP n on n.kid = k.ID"
    ):
        if reading in classes:
            priority[reading] = min(priority[reading], rank([tag]))

    buckets = defaultdict(list)
    polysemous = []
    for reading, cls in classes.items():
        if "reject" in cls:
            continue
        if reading[-1] not in "うくぐすつぬぶむる" or "を" in reading:
            continue
        if cls == {"iku"}:
            if reading == "いく":
                buckets["4-3"].append(reading)
            continue
        if "iku" in cls:
            continue
        if cls == {"godan", "ichidan"}:
            polysemous.append(reading)
            continue
        if cls == {"ichidan"}:
            if reading[-1] == "る" and len(reading) >= 2 and reading[-2] in I_ROW | E_ROW:
                buckets["2"].append(reading)
            continue
        # godan only
        if reading.endswith("いく"):
            continue
        if reading[-1] == "る" and len(reading) >= 2 and reading[-2] in I_ROW:
            buckets["4-1"].append(reading)
        elif reading[-1] == "る" and len(reading) >= 2 and reading[-2] in E_ROW:
            buckets["4-2"].append(reading)
        else:
            buckets["1"].append(reading)

    def key(r):
        return (0 if r in REQUIRED else 1, priority[r], len(r), r)

    lines = []
    for tag, target in TARGETS.items():
        pool = sorted(buckets[tag], key=key)
        if len(pool) < target:
            sys.exit(f"class {tag}: only {len(pool)} candidates, need {target}")
        for r in sorted(pool[:target]):
            flags = "compound" if compound[r] else ""
            lines.append(f"{r}\t{tag}\t{flags}")

    lines.append("する\tx\t")
    lines.append("くる\tx\t")
    for r in sorted(sorted(polysemous, key=key)[:POLYSEMOUS_SAMPLE]):
        flags = "compound,polysemous" if compound[r] else "polysemous"
        lines.append(f"{r}\tx\t{flags}")

    with open(out_path, "w", encoding="utf-8", newline="\n") as f:
        f.write("# Replication lexicon: hiragana past-tense verbs by conjugation type.\n")
        f.write("# Source: JMdict (EDRDG, CC BY-SA 4.0), hiragana readings only.\n")
        f.write("# Columns: lemma, type tag (1, 2, 4-1, 4-2, 4-3, x), flags.\n")
        for line in lines:
            f.write(line + "\n")


if __name__ == "__main__":
    main(sys.argv[1], sys.argv[2])
