#!/usr/bin/env python3
"""Regenerates the bundled fixture corpus. Output is deterministic."""

import json
import random
from pathlib import Path

ROOT = Path(__file__).resolve().parent

COUNCILS = {
    "AHRC": "Arts and Humanities Research Council (AHRC)",
    "EPSRC": "Engineering and Physical Sciences Research Council (EPSRC)",
    "ESRC": "Economic and Social Research Council (ESRC)",
    "BBSRC": "Biotechnology and Biological Sciences Research Council (BBSRC)",
    "MRC": "Medical Research Council (MRC)",
    "NERC": "Natural Environment Research Council (NERC)",
    "STFC": "Science and Technology Facilities Council (STFC)",
}

# id, title, council, funding type, min, max, total, percent, min dur, max dur, opening date
OPPORTUNITIES = [
    ("opp-0001", "Research networking grants in the arts and humanities", "AHRC", "grant",
     5000, 45000, 1500000, 80, "6 months", "24 months", "2023-02-01"),
    ("opp-0002", "New investigator awards in engineering", "EPSRC", "grant",
     None, 300000, None, None, "12 months", "36 months", "2023-03-15"),
    ("opp-0003", "Future leaders fellowships round eight", "MRC", "fellowship",
     400000, 1500000, 90000000, 80, "4 years", "7 years", "2023-01-10"),
    ("opp-0004", "Responsive mode research grants in economics", "ESRC", "grant",
     100000, 2000000, None, 80, "6 months", "5 years", "2022-11-01"),
    ("opp-0005", "Pioneer awards in plant sciences", "BBSRC", "grant",
     None, 250000, None, 80, "12 months", "18 months", "2023-04-03"),
    ("opp-0006", "Clinical research training fellowship", "MRC", "fellowship",
     None, None, None, 100, "2 years", "3 years", "2023-05-20"),
    ("opp-0007", "Environmental omics innovation pilots", "NERC", "grant",
     20000, 150000, 2000000, None, "6 months", "12 months", "2023-06-01"),
    ("opp-0008", "Capital infrastructure for astronomy", "STFC", "capital",
     500000, 5000000, 25000000, 100, "12 months", "48 months", "2022-09-12"),
    ("opp-0009", "Follow-on funding for impact and engagement", "AHRC", "grant",
     10000, 100000, 3000000, 80, "3 months", "18 months", "2023-07-07"),
    ("opp-0010", "Digital research infrastructure strategic programme", "EPSRC", "grant",
     250000, 3000000, 40000000, 80, "2 years", "4 years", "2023-08-14"),
]

FIELDS = ["minimum_award", "maximum_award", "total_funding", "funding_percentage",
          "minimum_funding_duration", "maximum_funding_duration"]

FILLER = ("research project team partner impact data method evidence community policy "
          "design training skills network outcome evaluation proposal support national "
          "international collaboration innovation discovery resource facility capability "
          "infrastructure scholarship theory practice challenge opportunity").split()


def money(v):
    return f"£{v:,}"


def filler(rng, words):
    return " ".join(rng.choice(FILLER) for _ in range(words)).capitalize() + "."


def doc_html(opp, rng, long_form):
    oid, title, council, ftype, mn, mx, total, pct, dmin, dmax, opening = opp
    y, m, d = opening.split("-")
    months = ["January", "February", "March", "April", "May", "June", "July", "August",
              "September", "October", "November", "December"]
    opening_long = f"{int(d)} {months[int(m) - 1]} {y}"
    summary = [
        ("Opportunity status", "Open"),
        ("Funders", COUNCILS[council]),
        ("Funding type", ftype.capitalize()),
        ("Total fund", money(total) if total else "Not specified"),
        ("Award range", f"{money(mn) if mn else 'No minimum'} - {money(mx) if mx else 'no maximum'}"),
        ("Publication date", opening_long),
        ("Opening date", opening_long),
        ("Closing date", f"{int(d)} {months[(int(m) + 2) % 12]} {y}"),
    ]
    if oid == "opp-0005":
        summary.append(("Previous call budget", money(1200000)))
    dl = "\n".join(f"  <dt>{k}:</dt>\n  <dd>{v}</dd>" for k, v in summary)

    funding = []
    if mx:
        funding.append(f"<p>The full economic cost of your project can be up to {money(mx)}.</p>")
    if mn:
        funding.append(f"<p>The minimum full economic cost you can apply for is {money(mn)}.</p>")
    if pct:
        funding.append(f"<p>UKRI will fund {pct}% of the full economic cost.</p>")
    if total:
        funding.append(f"<p>The total budget for this opportunity is {money(total)}.</p>")
    duration = f"<p>Projects can last between {dmin} and {dmax}.</p>"
    extra = ""
    if oid == "opp-0007":
        extra = "<p>Workshops will host up to 80 participants.</p>"

    sections = [
        ("What we're looking for", f"<p>{filler(rng, 60)}</p>{extra}<p>{filler(rng, 40)}</p>"),
        ("Who can apply", "<ul><li>UK research organisations</li><li>Independent research "
                          "organisations</li><li>Eligible public sector research establishments</li></ul>"
                          f"<p>{filler(rng, 30)}</p>"),
        ("Funding", "<h3>Funding available</h3>" + "".join(funding)
                    + "<h3>Project duration</h3>" + duration
                    + f"<p>{filler(rng, 20)}</p>"),
        ("How to apply", f"<p>{filler(rng, 50)}</p><h3>Assessment</h3><p>{filler(rng, 40)}</p>"),
    ]
    if long_form:
        for i in range(1, 9):
            body = "".join(f"<h3>Theme {i}.{j}</h3><p>{filler(rng, 90)}</p>"
                           f"<h4>Detail {i}.{j}</h4><p>{filler(rng, 70)}</p>" for j in range(1, 4))
            sections.append((f"Programme strand {i}", body))
    updates = ('<div class="updates"><h3>Update: 2 ' + months[(int(m)) % 12] + f' {y}</h3>'
               f'<p>{filler(rng, 12)}</p><h3>20 {months[(int(m) + 1) % 12]} {y}</h3>'
               f'<p>Closing date confirmed.</p></div>')
    sections.append(("Updates", updates))
    acc = "\n".join(
        f'<div class="govuk-accordion__section"><div class="govuk-accordion__section-header">'
        f'<h2 class="govuk-accordion__section-heading">{h}</h2></div>'
        f'<div class="govuk-accordion__section-content">{b}</div></div>'
        for h, b in sections)
    return f"""<!DOCTYPE html>
<html lang="en">
<head><meta charset="utf-8"><title>{title} &ndash; UKRI</title>
<script>window.dataLayer = [];</script></head>
<body>
<header><nav><a href="/">Home</a></nav></header>
<main id="main-content">
<h1 class="govuk-heading-xl">{title}</h1>
<p class="govuk-body-l">Apply for funding from {COUNCILS[council]}.</p>
<dl class="govuk-table opportunity__summary">
{dl}
</dl>
<div class="govuk-accordion" data-module="govuk-accordion">
{acc}
</div>
</main>
<footer><p>&copy; UKRI</p></footer>
</body>
</html>
"""


def gold_values(opp):
    oid, title, council, ftype, mn, mx, total, pct, dmin, dmax, opening = opp
    return {
        "minimum_award": str(mn) if mn else None,
        "maximum_award": str(mx) if mx else None,
        "total_funding": str(total) if total else None,
        "funding_percentage": str(pct) if pct else None,
        "minimum_funding_duration": dmin,
        "maximum_funding_duration": dmax,
    }


# Planted model errors: (doc, field) -> replayed answer (None = null).
PLANTED = {
    ("opp-0002", "minimum_award"): "300000",            # answers with the maximum award
    ("opp-0005", "total_funding"): "£1,200,000",        # value lifted from the summary table
    ("opp-0007", "funding_percentage"): "80",           # number elsewhere in the body
    ("opp-0002", "funding_percentage"): "75",           # invented
    ("opp-0008", "maximum_funding_duration"): "36 months",  # wrong value
    ("opp-0009", "minimum_award"): None,                # missed
}
MALFORMED = {("opp-0004", "minimum_funding_duration"): "The projects run for six months at least."}


def write_lines(path, rows):
    path.write_text("".join(json.dumps(r, ensure_ascii=False) + "\n" for r in rows), encoding="utf-8")


def corpus():
    rng = random.Random(20240501)
    out = ROOT / "corpus"
    (out / "docs").mkdir(parents=True, exist_ok=True)
    gold, replay = [], []
    for opp in OPPORTUNITIES:
        oid = opp[0]
        (out / "docs" / f"{oid}.html").write_text(doc_html(opp, rng, oid == "opp-0010"), encoding="utf-8")
        values = gold_values(opp)
        for f in FIELDS:
            gold.append({"doc_id": oid, "field": f, "gold_raw": values[f]})
            if (oid, f) in MALFORMED:
                replay.append({"doc_id": oid, "field": f, "response_text": MALFORMED[(oid, f)]})
                continue
            answer = PLANTED.get((oid, f), values[f])
            replay.append({"doc_id": oid, "field": f, "response_text": json.dumps({f: answer})})
    write_lines(out / "gold.jsonl", gold)
    write_lines(out / "replay.jsonl", replay)
    opps = [{"opportunity_id": o[0], "title": o[1], "funders": [COUNCILS[o[2]]], "opening_date": o[10],
             "funding_type": o[3], "award_min": o[4], "award_max": o[5]} for o in OPPORTUNITIES]
    write_lines(out / "opportunities.jsonl", opps)


def linking_and_store():
    out = ROOT / "corpus"
    orgs = [
        ("org-001", "University of Leeds", ["Leeds University"]),
        ("org-002", "University of Glasgow", []),
        ("org-003", "King's College London", ["Kings College London"]),
        ("org-004", "University of Bristol", []),
        ("org-005", "Cardiff University", ["Prifysgol Caerdydd"]),
    ]
    persons = [
        ("per-001", "Alice", "Morgan", ["org-001"]),
        ("per-002", "Ben", "Okafor", ["org-002"]),
        ("per-003", "Carla", "Jones", ["org-003"]),
        ("per-004", "Catherine", "Jones", ["org-005"]),
        ("per-005", "David", "Price", ["org-004"]),
        ("per-006", "Erin", "Walsh", ["org-009"]),  # affiliation to a missing organisation
    ]
    projects = [
        ("prj-001", "AH/X001/1", "AHRC", "Networks of memory in early modern print", "org-001", "per-001"),
        ("prj-002", "EP/Y002/1", "EPSRC", "Adaptive control for soft robotic actuators", "org-002", "per-002"),
        ("prj-003", "MR/Z003/1", "MRC", "Immune signalling in chronic inflammation", "org-003", "per-003"),
        ("prj-004", "ES/W004/1", "ESRC", "Household debt and regional labour markets", "org-004", "per-005"),
        ("prj-005", "AH/V005/1", "AHRC", "Community archives and digital heritage", "org-005", "per-004"),
        ("prj-006", "NE/T006/1", "NERC", "Soil microbial diversity under drought", "org-001", None),
    ]
    recs = []
    for oid, name, variants in orgs:
        recs.append({"type": "organisation", "id": oid, "name": name, "variant_names": variants})
    for pid, first, last, affs in persons:
        recs.append({"type": "person", "id": pid, "first_name": first, "surname": last,
                     "organisation_ids": affs})
    for pid, ref, council, title, lead, _ in projects:
        recs.append({"type": "project", "id": pid, "grant_reference": ref, "council": council,
                     "title": title, "abstract": f"{title}. An interdisciplinary study.",
                     "funding": [{"amount": 250000 + 1000 * len(title), "funder": council,
                                  "start": "2023-10-01", "end": "2026-09-30"}],
                     "lead_organisation_id": lead})
    for pid, *_, pi in projects:
        if pi:
            recs.append({"type": "project_member", "project_id": pid, "person_id": pi, "role": "PI"})
    recs.append({"type": "project_member", "project_id": "prj-999", "person_id": "per-002", "role": "CO_I"})
    recs.append({"type": "project_partner", "project_id": "prj-001", "organisation_id": "org-002",
                 "role": "collaborator"})
    recs.append({"type": "project_partner", "project_id": "prj-003", "organisation_id": "org-404",
                 "role": "collaborator"})
    recs.append({"type": "project", "grant_reference": "BB/S007/1", "council": "BBSRC",
                 "title": "Root architecture and nitrogen uptake", "abstract": "Derived-id project.",
                 "funding": [{"amount": 180000, "funder": "BBSRC", "start": "2022-01-01", "end": "2024-12-31"}]})
    outcomes = [
        ("prj-001", "publication", {"title": "Print and memory", "journal": "Past & Present", "year": 2024}),
        ("prj-002", "collaboration", {"partner_organisation": "Rolls-Royce", "sector": "Aerospace"}),
        ("prj-003", "dissemination", {"form": "Public lecture", "audience": "Public", "year": 2024}),
        ("prj-004", "policy_influence", {"description": "Evidence to the Treasury committee"}),
        ("prj-002", "intellectual_property", {"title": "Soft gripper", "protection": "Patent"}),
        ("prj-002", "spin_out", {"company_name": "Softgrip Ltd", "year": 2025}),
        ("prj-005", "other", {"description": "Community exhibition"}),
    ]
    for pid, kind, payload in outcomes:
        recs.append({"type": "outcome", "project_id": pid, "kind": kind, "payload": payload})
    recs.append({"type": "outcome", "project_id": "prj-001", "kind": "publication",
                 "payload": {"journal": "Missing title"}})  # schema violation: skipped and counted
    write_lines(out / "store.jsonl", recs)

    meetings = [
        ("mtg-01", "AHRC", "Research networking panel", "2023-05-10"),
        ("mtg-02", "EPSRC", "New investigator award panel", "2023-06-20"),
        ("mtg-03", "MRC", "Fellowships interview panel", "2023-04-02"),
        ("mtg-04", "ESRC", "Economics responsive mode panel", "2023-01-15"),
        ("mtg-05", "AHRC", "Follow on funding for impact and engagement panel", "2023-09-30"),
    ]
    lines = ["meeting_id,council,name,date"] + [f"{a},{b},{c},{d}" for a, b, c, d in meetings]
    (out / "meetings.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")

    apps = [
        {"record_id": "app-01", "council": "AHRC", "application_id": "ah/x001/1", "title":
         "Networks of memory in early-modern print", "pi_surname": "Morgan", "organisation": "University of Leeds",
         "opportunity_name": "Research networking grants in the arts & humanities", "meeting_ref": "mtg-01",
         "route": "grant", "total_awarded": 40000, "outcome_status": "funded"},
        {"record_id": "app-02", "council": "EPSRC", "award_id": "EP/Y002/1", "title":
         "Adaptive control of soft robotic actuators", "pi_surname": "Okafor", "organisation": "Glasgow University",
         "opportunity_name": "New investigator award", "meeting_ref": "mtg-02", "route": "grant",
         "total_awarded": 280000, "outcome_status": "funded"},
        {"record_id": "app-03", "council": "MRC", "application_id": "MR/Z003/1", "title":
         "Immune signalling in chronic inflammation", "pi_surname": "Jones", "organisation": "Kings College London",
         "meeting_ref": "mtg-03", "route": "fellowship", "total_awarded": 900000, "outcome_status": "funded"},
        {"record_id": "app-04", "council": "ESRC", "application_id": "ES/W004/1", "title":
         "Household debt and regional labour markets", "pi_surname": "Price", "organisation":
         "University of Bristol", "opportunity_name": "Responsive mode grants economics",
         "meeting_ref": "mtg-04", "route": "grant", "total_awarded": 2500000, "outcome_status": "funded"},
        {"record_id": "app-05", "council": "AHRC", "application_id": "AH/Q999/1", "title":
         "Unfunded proposal", "meeting_ref": "mtg-05", "outcome_status": "rejected"},
    ]
    write_lines(out / "applications.jsonl", apps)

    appearances = [
        ("pa-01", "AHRC", "Morgan", "Alice", "University of Leeds", "mtg-01"),
        ("pa-02", "AHRC", "Morgan", "A.", "Leeds University", "mtg-05"),
        ("pa-03", "MRC", "Jones", "Carla", "King's College London", "mtg-03"),
        ("pa-04", "MRC", "Jones", "C", "Kings College London", "mtg-03"),
        ("pa-05", "MRC", "Jones", "Catherine", "Cardiff University", "mtg-03"),
        ("pa-06", "EPSRC", "Okafor", "Ben", "University of Glasgow", "mtg-02"),
        ("pa-07", "ESRC", "Price", "D", "", "mtg-04"),
    ]
    lines = ["appearance_id,council,surname,first_name_or_initial,organisation,meeting_ref"]
    lines += [",".join(f'"{v}"' if "," in v or "'" in v else v for v in row) for row in appearances]
    (out / "appearances.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")


if __name__ == "__main__":
    corpus()
    linking_and_store()
