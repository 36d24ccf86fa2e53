#!/usr/bin/env python3
# Copyright 2026 The CAI Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Generates the bundled synthetic corpus.

Writes, under the output directory:
  docs/<doc_id>.txt   disclosure documents in formulaic target language
  manifest.jsonl      one DocumentMeta per document
  golden.jsonl        the commitments each document states
  examples.jsonl      golden example store for dynamic prompting

Output is a pure function of --seed.
"""

import argparse
import json
import random
from pathlib import Path

COMPANIES = [
    ("ACM", "Acme Industries", "Acme"),
    ("BRL", "Borealis Foods plc", "Borealis Foods"),
    ("CDX", "Cordex Logistics", "Cordex Logistics"),
    ("DLT", "Delta Paper Group", "Delta Paper"),
    ("ELM", "Elmwood Retail Ltd", "Elmwood Retail"),
    ("FNX", "Fenix Chemicals", "Fenix Chemicals"),
    ("GRV", "Granvia Telecom", "Granvia Telecom"),
    ("HLX", "Helix Pharmaceuticals Inc", "Helix Pharmaceuticals"),
    ("IRD", "Iridia Mining", "Iridia Mining"),
    ("JNP", "Juniper Apparel", "Juniper Apparel"),
    ("KST", "Kestrel Airlines", "Kestrel Airlines"),
    ("LUM", "Lumora Energy", "Lumora Energy"),
    ("MRD", "Meridian Cement", "Meridian Cement"),
    ("NVA", "Nova Semiconductors", "Nova Semiconductors"),
    ("ORC", "Orchid Hotels", "Orchid Hotels"),
    ("PLR", "Polaris Shipping", "Polaris Shipping"),
    ("QNT", "Quanta Software", "Quanta Software"),
    ("RVN", "Raven Automotive", "Raven Automotive"),
    ("SLT", "Saltmarsh Beverages", "Saltmarsh Beverages"),
    ("TRN", "Terran Steel", "Terran Steel"),
    ("UMB", "Umbra Textiles", "Umbra Textiles"),
    ("VRD", "Verdant Packaging", "Verdant Packaging"),
    ("WLW", "Willow Healthcare", "Willow Healthcare"),
    ("XEN", "Xenon Electronics", "Xenon Electronics"),
]

# Business prose with no emission vocabulary and no "by <year>" phrases.
FILLER = [
    "Revenue grew in every region and our order book remains strong.",
    "We opened two new distribution centres to shorten delivery times.",
    "Our board met eleven times during the year and reviewed all major investments.",
    "Employee engagement scores improved for the third consecutive year.",
    "We continued to invest in digital tools that simplify the customer journey.",
    "Health and safety remains our first priority at every location.",
    "The audit committee reviewed the internal control framework in detail.",
    "We welcomed more than four hundred graduates into our training programme.",
    "Customer satisfaction surveys show steady improvement across product lines.",
    "Our suppliers signed an updated code of conduct covering labour standards.",
    "We simplified our organisational structure to speed up decision making.",
    "Community volunteering hours rose as more colleagues joined local projects.",
    "Working capital was managed tightly and cash conversion stayed high.",
    "We refreshed our brand and launched a new website for retail customers.",
    "Product recalls remained rare and were handled quickly and transparently.",
    "Our research teams filed several new patents during the period.",
    "Diversity in senior leadership increased compared with the prior year.",
    "We renewed our long term banking facilities on favourable terms.",
    "Cyber security training was completed by nearly all employees.",
    "Zero food waste for manufactured product remains an ambition for our canteens.",
    "We reduced water withdrawal at our largest site compared with last year.",
    "In 2022 we achieved a 15% reduction in packaging weight per order.",
    "Shareholders approved the final dividend at the annual general meeting.",
    "Our pension schemes remain well funded according to the latest valuation.",
    "We expanded our apprenticeship programme to three additional countries.",
    "Logistics partners were reviewed against service quality criteria.",
    "The new enterprise resource planning system went live without disruption.",
    "Our innovation fund supported twelve early stage partnerships.",
]

TITLES = [
    "{name} {year} Sustainability Report.",
    "{name} Annual Report {year}.",
]


def pct(rng):
    return rng.choice([15, 20, 25, 30, 35, 40, 42, 46, 50, 55, 60, 63, 70])


def commitment(rng, short, kind):
    """Returns (sentence, list of metric dicts, list of raw expected dicts)."""
    by = rng.choice([2015, 2017, 2018, 2019, 2020, 2021])
    ty = rng.choice([2025, 2028, 2030, 2032, 2035])
    if kind == "absolute_12":
        p = pct(rng)
        s = (f"{short} commits to reduce absolute scope 1 and 2 GHG emissions {p}% "
             f"by {ty} from a {by} base year.")
        recs = [(ty, by, p, "absolute", "12")]
    elif kind == "split_12_3":
        p1, p2 = pct(rng), pct(rng)
        s = (f"We plan to reduce absolute scope 1 and 2 emissions by {p1}% and scope 3 "
             f"emissions by {p2}% by {ty} from {by}.")
        recs = [(ty, by, p1, "absolute", "12"), (ty, by, p2, "absolute", "3")]
    elif kind == "intensity_12":
        p = pct(rng)
        s = (f"We commit to reduce scope 1 and 2 GHG emissions {p}% per unit of revenue "
             f"by {ty} from a {by} base year.")
        recs = [(ty, by, p, "intensity", "12")]
    elif kind == "intensity_3":
        p = pct(rng)
        s = (f"{short} aims to reduce scope 3 emissions intensity by {p}% per tonne of "
             f"product by {ty} from {by}.")
        recs = [(ty, by, p, "intensity", "3")]
    elif kind == "absolute_123":
        p = pct(rng)
        s = (f"Our target is to cut absolute scope 1, 2 and 3 emissions by {p}% by {ty} "
             f"against a {by} baseline.")
        recs = [(ty, by, p, "absolute", "123")]
    elif kind == "fy_absolute_2":
        p = pct(rng)
        s = (f"We will reduce absolute scope 2 emissions by {p}% by FY{ty % 100:02d} "
             f"from FY{by % 100:02d}.")
        recs = [(ty, by, p, "absolute", "2")]
    elif kind == "net_zero":
        nz = rng.choice([2040, 2045, 2050])
        s = f"{short} commits to reach net zero emissions across all scopes by {nz}."
        recs = [(nz, None, None, "net_zero", "123")]
    elif kind == "own_ops":
        p = pct(rng)
        s = (f"We aim to reduce absolute emissions from our own operations by {p}% "
             f"by {ty} from {by}.")
        recs = [(ty, by, p, "absolute", "12")]
    else:
        raise ValueError(kind)
    return s, recs


KINDS = ["absolute_12", "split_12_3", "intensity_12", "intensity_3", "absolute_123",
         "fy_absolute_2", "net_zero", "own_ops"]

RESTATE = {
    "absolute_12": "Progress update: we remain committed to our goal to reduce absolute scope 1 and 2 "
                   "emissions by {p}% by {ty} from {by}.",
}


def metric_json(company_id, doc_id, rec):
    ty, by, p, tt, sc = rec
    return {"company_id": company_id, "doc_id": doc_id, "target_year": ty, "base_year": by,
            "target_percent": None if p is None else float(p), "target_type": tt, "scope": sc}


def raw_json(rec, sentence, entity):
    ty, by, p, tt, sc = rec
    wording = {"absolute": "absolute emissions reduction",
               "intensity": "emissions intensity reduction",
               "net_zero": "Net Zero emissions"}[tt]
    def year(y):
        # fiscal-year sentences state years as FYnn
        fy = f"FY{y % 100:02d}"
        return fy if fy in sentence else str(y)
    return {"target_year": year(ty), "base_year": "NO_ANSWER" if by is None else year(by),
            "target_percent": "NO_ANSWER" if p is None else f"{p}%",
            "target_type": "net zero" if tt == "net_zero" else tt, "scope": sc,
            "target_wording": wording, "sub_context": sentence,
            "entity_name": entity or "NO_ANSWER"}


def fillers(rng, n):
    return [rng.choice(FILLER) for _ in range(n)]


def build_document(rng, idx, company):
    company_id, name, short = company
    year = 2021 + idx % 3
    doc_id = f"{company_id.lower()}_{year}"
    title = rng.choice(TITLES).format(name=name, year=year)
    kinds = rng.sample(KINDS, k=rng.choice([1, 2, 2, 3]))
    sentences = [title] + fillers(rng, rng.randint(6, 14))
    golden = []
    seen = set()
    for kind in kinds:
        s, recs = commitment(rng, short, kind)
        sentences.append(s)
        for r in recs:
            if r not in seen:
                seen.add(r)
                golden.append(r)
        sentences += fillers(rng, rng.randint(4, 12))
        if kind == "absolute_12" and rng.random() < 0.7:
            ty, by, p, _, _ = recs[0]
            sentences += fillers(rng, rng.randint(5, 10))
            sentences.append(RESTATE[kind].format(p=p, ty=ty, by=by))
    sentences += fillers(rng, rng.randint(3, 8))
    text = ""
    for i, s in enumerate(sentences):
        text += s + ("\n\n" if i % 5 == 4 else " ")
    meta = {"company_id": company_id, "company_name": name,
            "report_type": "sustainability" if "Sustainability" in title else "annual",
            "publication_year": year, "source_path": f"docs/{doc_id}.txt"}
    return doc_id, text.strip() + "\n", meta, [metric_json(company_id, doc_id, r) for r in golden]


EXAMPLE_COMPANIES = ["Northwind", "Contoso", "Fabrikam", "Tailspin Toys", "Wingtip",
                     "Litware", "Proseware", "Adatum", "Lucerne Publishing", "Woodgrove"]


def build_examples(rng, target=71):
    examples = []
    while len(examples) < target:
        short = rng.choice(EXAMPLE_COMPANIES)
        lead = rng.choice(FILLER)
        tail = rng.choice(FILLER)
        kinds = rng.sample(KINDS, k=2 if rng.random() < 0.3 else 1)
        parts = []
        for kind in kinds:
            s, recs = commitment(rng, short, kind)
            entity = short if s.startswith(short) else None
            parts.append((s, [raw_json(r, s, entity) for r in recs]))
        context = " ".join([lead] + [p[0] for p in parts] + [tail])
        for s, expected in parts:
            if len(examples) < target:
                examples.append({"context": context, "sub_context": s, "expected": expected})
    return examples


def write_jsonl(path, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for r in rows:
            f.write(json.dumps(r, ensure_ascii=False) + "\n")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "data" / "synthetic"))
    ap.add_argument("--seed", type=int, default=20240917)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    out = Path(args.out)
    (out / "docs").mkdir(parents=True, exist_ok=True)
    manifest, golden = [], []
    for idx, company in enumerate(COMPANIES):
        doc_id, text, meta, gold = build_document(rng, idx, company)
        (out / "docs" / f"{doc_id}.txt").write_text(text, encoding="utf-8")
        manifest.append(meta)
        golden += gold
    write_jsonl(out / "manifest.jsonl", manifest)
    write_jsonl(out / "golden.jsonl", golden)
    write_jsonl(out / "examples.jsonl", build_examples(rng))


if __name__ == "__main__":
    main()
