"""Regenerates sim_small.json from the fixture corpus.

usage: illustrate-cli ingest --corpus corpus_small.json --phrases phrases.json
       python3 make_similarity.py phrases.json corpus_small.json bank_small.json > sim_small.json

Logits are multiples of 1/4 so the text and binary encodings agree exactly.
"""
import json
import random
import sys

phrases = json.load(open(sys.argv[1]))
corpus = json.load(open(sys.argv[2]))
bank = [img["id"] for img in json.load(open(sys.argv[3]))["images"]]

gold = {}
for book in corpus["books"]:
    for chapter in book["chapters"]:
        for section in chapter["sections"]:
            for sub in section["subsections"]:
                gold[sub["id"]] = sub["gold_images"]

rng = random.Random(7)
rows = []
for p in phrases:
    row = []
    for image in bank:
        base = 3.0 if image in gold[p["subsection_id"]] else 0.0
        row.append(base + rng.randint(-4, 8) / 4.0)
    rows.append(row)

json.dump({"format": "SIMM", "version": 1, "n_phrases": len(phrases), "n_images": len(bank),
           "phrase_ids": [p["id"] for p in phrases], "image_ids": bank, "logits": rows},
          sys.stdout, indent=1)
print()
