#!/usr/bin/env python3
"""Regenerate the bundled fixture KB and its side files.

Deterministic: fixed seeds, stable iteration order. The KB is a synthetic
people/organizations/places world with both genuine set predicates
(child ~ numberOfChildren, employer^-1 ~ numberOfEmployees,
birthPlace^-1 ~ population) and negatives (identifiers, measurements,
dates, functional predicates).

Usage: python scripts/make_fixtures.py [fixtures_dir]
"""

import random
import sys
from pathlib import Path

SEED = 20240807

FIRST = ["Ada", "Ben", "Cleo", "Dev", "Ede", "Finn", "Gia", "Hal", "Ines",
         "Jo", "Kim", "Lev", "Mia", "Ned", "Ola", "Pia", "Quin", "Rae",
         "Sol", "Tea"]
LAST = ["Abara", "Bloom", "Calder", "Duarte", "Egan", "Falk", "Giese",
        "Hart", "Iwata", "Jonas", "Kline", "Lund", "Marsh", "Nolan",
        "Okafor", "Pratt"]


def main(out_dir: Path) -> None:
    rng = random.Random(SEED)
    out_dir.mkdir(parents=True, exist_ok=True)

    people = [f"person_{i:04d}" for i in range(800)]
    orgs = [f"org_{i:03d}" for i in range(60)]
    places = [f"place_{i:03d}" for i in range(55)]
    parties = [f"party_{i:03d}" for i in range(52)]
    events = [f"event_{i:03d}" for i in range(30)]
    works = [f"work_{i:03d}" for i in range(60)]

    triples = []  # (subject, predicate_iri, lexical_or_entity, kind)

    def ent(s, p, o):
        triples.append((s, p, o, "entity"))

    def lit(s, p, lexical):
        triples.append((s, p, str(lexical), None))

    # child / numberOfChildren: the canonical aligned pair
    children_of = {}
    for person in people:
        if rng.random() < 0.5:
            kids = rng.sample([q for q in people if q != person], rng.randint(1, 6))
            children_of[person] = kids
            for kid in kids:
                ent(person, "ex:child", kid)
    for person in people:
        kids = children_of.get(person)
        if kids and rng.random() < 0.9:
            value = len(kids) + (rng.randint(1, 3) if rng.random() < 0.25 else 0)
            lit(person, "ex:numberOfChildren", value)
        elif not kids and rng.random() < 0.05:
            lit(person, "ex:numberOfChildren", rng.randint(0, 2))

    # employer / numberOfEmployees (via employer^-1)
    staff_count = {org: 0 for org in orgs}
    for i, person in enumerate(people):
        if i < len(orgs) or rng.random() < 0.85:
            org = orgs[i % len(orgs)] if i < len(orgs) else rng.choice(orgs)
            ent(person, "ex:employer", org)
            staff_count[org] += 1
    for org in orgs:
        value = int(staff_count[org] * 55 * rng.uniform(0.8, 1.3)) + rng.randint(0, 40)
        lit(org, "ex:numberOfEmployees", value)

    # birthPlace (functional) / population of the place
    born_in = {}
    for person in people:
        place = rng.choice(places)
        born_in.setdefault(place, []).append(person)
        ent(person, "ex:birthPlace", place)
    for place in places:
        value = len(born_in.get(place, [])) * 900 + rng.randint(0, 800)
        lit(place, "ex:population", value)

    # party membership / memberCount (sub-threshold alignment support)
    members_of = {}
    for person in people:
        if rng.random() < 0.4:
            party = rng.choice(parties)
            members_of.setdefault(party, []).append(person)
            ent(person, "ex:memberOfParty", party)
    for party in parties:
        value = len(members_of.get(party, [])) * 12 + rng.randint(0, 30)
        lit(party, "ex:memberCount", value)

    # occupation, awards, wins, spouse
    for person in people:
        if rng.random() < 0.65:
            for work in rng.sample(works, rng.randint(1, 2)):
                ent(person, "ex:occupation", work)
    awarded = {}
    for person in people:
        if rng.random() < 0.18:
            evs = rng.sample(events, rng.randint(1, 3))
            awarded[person] = evs
            for ev in evs:
                ent(person, "ex:award", ev)
    for person, evs in sorted(awarded.items()):
        if rng.random() < 0.8:
            lit(person, "ex:wins", len(evs) + (rng.randint(1, 4) if rng.random() < 0.4 else 0))
    for person in people:
        if rng.random() < 0.3:
            ent(person, "ex:spouse", rng.choice([q for q in people[:100] if q != person]))

    # negatives: identifiers, measurements, dates, free text, comma lists
    used_ids = set()
    for person in people:
        if rng.random() < 0.5:
            pid = rng.randint(100000, 999999)
            while pid in used_ids:
                pid = rng.randint(100000, 999999)
            used_ids.add(pid)
            lit(person, "ex:playerId", pid)
        if rng.random() < 0.7:
            lit(person, "ex:height", f"1.{rng.randint(40, 99)}")
    for place in places:
        lit(place, "ex:zipCode", rng.randint(10000, 99999))
    for org in orgs:
        lit(org, "ex:foundingYear", rng.randint(1900, 2015))
        names = ", ".join(
            f"{rng.choice(FIRST)} {rng.choice(LAST)}" for _ in range(rng.randint(2, 4))
        )
        lit(org, "ex:members", names)
        if rng.random() < 0.6:
            lit(org, "ex:description", f"a company founded in place {rng.choice(places)}")

    # kb.nt
    def nt_term(lexical, kind):
        if kind == "entity":
            return f"<{lexical}>"
        return f'"{lexical}"'

    with open(out_dir / "kb.nt", "w") as fh:
        fh.write("# synthetic fixture KB\n")
        for s, p, o, kind in triples:
            fh.write(f"<{s}> <{p}> {nt_term(o, kind)} .\n")

    # class_map.tsv (about 12% of entities left unmapped -> Thing)
    with open(out_dir / "class_map.tsv", "w") as fh:
        for group, cls in [(people, "Person"), (orgs, "Organization"),
                           (places, "Place"), (parties, "Organization"),
                           (events, "Event"), (works, "Work")]:
            for e in group:
                if rng.random() < 0.88:
                    fh.write(f"{e}\t{cls}\n")

    # frequencies.tsv: plural/singular web-frequency snapshot
    freqs = {
        "child": 87_000_000, "children": 128_000_000,
        "birthplace": 21_000_000, "birthplaces": 1_550_000,
        "employer": 40_000_000, "employers": 52_000_000,
        "employee": 61_000_000, "employees": 90_000_000,
        "member": 70_000_000, "members": 95_000_000,
        "place": 180_000_000, "places": 120_000_000,
        "population": 88_000_000, "populations": 9_000_000,
        "party": 96_000_000, "parties": 72_000_000,
        "occupation": 21_000_000, "occupations": 17_000_000,
        "award": 54_000_000, "awards": 77_000_000,
        "win": 110_000_000, "wins": 89_000_000,
        "spouse": 18_000_000, "spouses": 7_000_000,
        "height": 95_000_000, "heights": 11_000_000,
        "year": 480_000_000, "years": 510_000_000,
        "id": 300_000_000, "ids": 41_000_000,
        "code": 190_000_000, "codes": 35_000_000,
        "count": 140_000_000, "counts": 32_000_000,
        "description": 130_000_000, "descriptions": 18_000_000,
        "number": 320_000_000, "numbers": 150_000_000,
        "player": 105_000_000, "players": 131_000_000,
        "zip": 44_000_000, "zips": 2_000_000,
    }
    with open(out_dir / "frequencies.tsv", "w") as fh:
        for term in sorted(freqs):
            fh.write(f"{term}\t{freqs[term]}\n")

    # embeddings.txt: clustered random vectors, dimension 12
    clusters = {
        "family": ["child", "children", "spouse", "parent"],
        "staffing": ["employer", "employee", "employees", "staff", "member",
                     "members", "party"],
        "geo": ["birth", "place", "population", "zip"],
        "counting": ["number", "count", "total", "wins", "win", "of"],
        "org": ["founding", "company", "organization"],
        "misc": ["occupation", "award", "work", "description", "height",
                 "year", "code", "player"],
    }
    erng = random.Random(SEED + 1)
    with open(out_dir / "embeddings.txt", "w") as fh:
        rows = []
        for cluster, words in clusters.items():
            base = [erng.uniform(-1, 1) for _ in range(12)]
            for word in words:
                vec = [b + erng.uniform(-0.25, 0.25) for b in base]
                rows.append((word, vec))
        for word, vec in sorted(rows):
            fh.write(word + " " + " ".join(f"{v:.5f}" for v in vec) + "\n")

    # class judgments: 3 graded responses per predicate per classifier kind
    def j(pred, kind, *responses):
        return {"predicate": pred, "kind": kind, "responses": list(responses)}

    judgments = [
        # enumerating classifier
        j("ex:child", "enumerating", "Yes", "Yes", "Yes"),
        j("ex:child^-1", "enumerating", "MaybeNo", "No", "MaybeNo"),
        j("ex:employer^-1", "enumerating", "Yes", "Yes", "MaybeYes"),
        j("ex:occupation^-1", "enumerating", "Yes", "MaybeYes", "Yes"),
        j("ex:birthPlace", "enumerating", "No", "No", "MaybeNo"),
        j("ex:birthPlace^-1", "enumerating", "Yes", "MaybeYes", "Yes"),
        j("ex:memberOfParty^-1", "enumerating", "Yes", "Yes", "Yes"),
        j("ex:memberOfParty", "enumerating", "No", "MaybeNo", "No"),
        j("ex:members", "enumerating", "Yes", "MaybeYes", "Yes"),
        j("ex:award", "enumerating", "Yes", "MaybeYes", "MaybeYes"),
        j("ex:award^-1", "enumerating", "Yes", "MaybeYes", "Yes"),
        j("ex:spouse", "enumerating", "MaybeNo", "MaybeYes", "DoNotKnow"),  # dropped
        j("ex:occupation", "enumerating", "MaybeYes", "Yes", "MaybeYes"),
        j("ex:employer", "enumerating", "No", "MaybeNo", "MaybeNo"),
        j("ex:height", "enumerating", "No", "No", "No"),
        j("ex:description", "enumerating", "No", "No", "No"),
        j("ex:playerId", "enumerating", "No", "No", "No"),
        j("ex:numberOfChildren", "enumerating", "No", "No", "MaybeNo"),
        j("ex:population", "enumerating", "No", "No", "No"),
        j("ex:foundingYear", "enumerating", "No", "No", "No"),
        j("ex:wins", "enumerating", "No", "MaybeNo", "No"),
        j("ex:zipCode", "enumerating", "No", "No", "No"),
        # counting classifier
        j("ex:numberOfChildren", "counting", "Yes", "Yes", "Yes"),
        j("ex:numberOfEmployees", "counting", "Yes", "Yes", "MaybeYes"),
        j("ex:population", "counting", "Yes", "MaybeYes", "Yes"),
        j("ex:memberCount", "counting", "Yes", "Yes", "MaybeYes"),
        j("ex:wins", "counting", "Yes", "MaybeYes", "MaybeYes"),
        j("ex:playerId", "counting", "No", "No", "No"),
        j("ex:zipCode", "counting", "No", "No", "MaybeNo"),
        j("ex:foundingYear", "counting", "No", "MaybeNo", "No"),
        j("ex:height", "counting", "No", "No", "No"),
        j("ex:child", "counting", "No", "No", "No"),
        j("ex:employer", "counting", "No", "No", "No"),
        j("ex:members", "counting", "No", "MaybeNo", "No"),
        j("ex:description", "counting", "No", "No", "No"),
        j("ex:birthPlace", "counting", "No", "No", "No"),
        j("ex:spouse", "counting", "MaybeNo", "DoNotKnow", "MaybeYes"),  # dropped
    ]
    import json
    with open(out_dir / "class_judgments.jsonl", "w") as fh:
        for row in judgments:
            fh.write(json.dumps(row, sort_keys=True) + "\n")

    # relevance judgments over alignment pairs (graded)
    def r(direction, source, target, *resp):
        return {
            "direction": direction, "source": source, "target": target,
            "responses": [
                {"relatedness": a, "completeness": b} for a, b in resp
            ],
        }

    c2e = "counting_to_enumerating"
    e2c = "enumerating_to_counting"
    relevance = [
        r(c2e, "ex:numberOfChildren", "ex:child",
          ("High", "Complete"), ("High", "Incomplete"), ("High", "Complete")),
        r(c2e, "ex:numberOfChildren", "ex:employer",
          ("None", "Unrelated"), ("Low", "Unrelated"), ("None", "Unrelated")),
        r(c2e, "ex:numberOfChildren", "ex:birthPlace",
          ("None", "Unrelated"), ("None", "Unrelated"), ("None", "Unrelated")),
        r(c2e, "ex:numberOfEmployees", "ex:employer^-1",
          ("High", "Incomplete"), ("High", "Incomplete"), ("Moderate", "Incomplete")),
        r(c2e, "ex:numberOfEmployees", "ex:members",
          ("Moderate", "Incomplete"), ("Moderate", "Incomplete"), ("Low", "Incomplete")),
        r(c2e, "ex:population", "ex:birthPlace^-1",
          ("Moderate", "Incomplete"), ("High", "Incomplete"), ("Moderate", "Incomplete")),
        r(c2e, "ex:population", "ex:memberOfParty^-1",
          ("None", "Unrelated"), ("Low", "Unrelated"), ("None", "Unrelated")),
        r(e2c, "ex:child", "ex:numberOfChildren",
          ("High", "Complete"), ("High", "Complete"), ("High", "Incomplete")),
        r(e2c, "ex:child", "ex:wins",
          ("None", "Unrelated"), ("None", "Unrelated"), ("Low", "Unrelated")),
        r(e2c, "ex:employer^-1", "ex:numberOfEmployees",
          ("High", "Incomplete"), ("High", "Incomplete"), ("High", "Incomplete")),
        r(e2c, "ex:birthPlace^-1", "ex:population",
          ("Moderate", "Incomplete"), ("Moderate", "Incomplete"), ("High", "Incomplete")),
        r(e2c, "ex:members", "ex:numberOfEmployees",
          ("Moderate", "Incomplete"), ("Low", "Incomplete"), ("Moderate", "Incomplete")),
        r(e2c, "ex:occupation", "ex:numberOfChildren",
          ("None", "Unrelated"), ("None", "Unrelated"), ("None", "Unrelated")),
    ]
    with open(out_dir / "relevance_judgments.jsonl", "w") as fh:
        for row in relevance:
            fh.write(json.dumps(row, sort_keys=True) + "\n")

    # config.ini
    config = f"""[paths]
artifacts = artifacts
input = fixtures/kb.nt
class_map = fixtures/class_map.tsv
freq_table = fixtures/frequencies.tsv
embeddings = fixtures/embeddings.txt
labels = fixtures/class_judgments.jsonl

[ingest]
format = ntriples
kb = custom
inverse = true
dedup = true
date_heuristic = true

[stats]
min_count = 50

[profile]
samples = 100
seed = 7

[train]
model = logistic
seed = 7

[classify]
id_filter = true

[align]
min_support = 50
k = 3
combine = normalized
value_agg = max

[service]
host = 127.0.0.1
port = 8040
workers = 8
cors_origin = http://localhost:8030
"""
    (out_dir / "config.ini").write_text(config)

    print(f"fixtures: {len(triples)} forward triples -> {out_dir}")


if __name__ == "__main__":
    main(Path(sys.argv[1]) if len(sys.argv) > 1 else Path("fixtures"))
