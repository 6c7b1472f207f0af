#!/usr/bin/env python3
"""Writes the bundled sample corpus and QA table under data/.

Output is a pure function of the seed, so rerunning leaves the files
byte-identical. Documents mimic scanned nuclear-engineering reports: wrapped
paragraphs, author-year and numeric citations, formula lines, stray
non-ASCII lines, form-feed page breaks and two trailing reference pages.
"""

import argparse
import random
from pathlib import Path

SUBJECTS = [
    "The zircaloy cladding", "The fuel pellet", "The primary coolant", "The moderator",
    "The calandria vessel", "The steam generator", "The heat exchanger", "The pressure tube",
    "The control rod", "The boron carbide absorber", "The thoria blanket", "The ferritic steel",
    "The weld joint", "The flange assembly", "The lubricant film", "The plenum spring",
    "The uranium oxide matrix", "The plutonium bearing fuel", "The sodium loop",
    "The reactor shutdown system", "The irradiated specimen", "The annealed sample",
]
VERBS = [
    "shows", "exhibits", "undergoes", "maintains", "requires", "limits", "controls",
    "accelerates", "reduces", "increases", "governs", "affects",
]
OBJECTS = [
    "significant irradiation creep", "reduced thermal conductivity", "enhanced hydrogen pickup",
    "localized pitting corrosion", "stable neutron flux", "higher fission gas release",
    "uniform temperature distribution", "moderate swelling", "early crack initiation",
    "improved lubrication behaviour", "poor luminescence response", "adequate reactivity margin",
    "rapid oxidation of the cladding", "delayed hydride cracking", "high lethargy neutrons",
    "strong electrochemical polarisation", "ultrasonic attenuation", "measurable vapour pressure",
    "extensive machining damage", "lubricated sliding wear",
]
CONDITIONS = [
    "under normal operating conditions", "during the loss of coolant transient",
    "at elevated burnup", "after prolonged annealing", "at the end of the fuel cycle",
    "during reactor startup", "in the presence of dissolved oxygen", "near the fuel centerline",
    "at low neutron fluence", "within the lubricated bearing", "following radiography of the welds",
    "in the ferritic heat affected zone",
]
AUTHORS = ["Walters", "Cockraft", "Coleman", "Kumar", "Sinha", "Rao", "Olander", "Fink",
           "Lucuta", "Matzke", "Ronchi", "Bhabha"]
FORMULAS = [
    "k_eff = k_inf * P_NL = 1.0024",
    "q' = 4 * pi * k * (T0 - Ts)",
    "sigma_t = sigma_a + sigma_s",
    "phi(r) = A * J0(2.405 * r / R)",
    "dN/dt = -lambda * N + R",
]
NON_ASCII = [
    "Temperature range 300–600 °C was examined.",
    "The α and β phases coexist near the transus.",
    "Measured flux was 2.4 × 10^13 n/cm2/s in the core.",
]


def citation(rng):
    kind = rng.randrange(4)
    year = rng.randrange(1965, 2019)
    a, b = rng.sample(AUTHORS, 2)
    if kind == 0:
        return f"[{rng.randrange(1, 60)}]"
    if kind == 1:
        return f"({a}, {year})"
    if kind == 2:
        return f"({a} and {b}, {year})"
    return f"({a} et al., {year}{rng.choice(['', 'a', 'b'])})"


def sentence(rng):
    s = f"{rng.choice(SUBJECTS)} {rng.choice(VERBS)} {rng.choice(OBJECTS)} {rng.choice(CONDITIONS)}"
    if rng.random() < 0.3:
        s += " " + citation(rng)
    if rng.random() < 0.15:
        s += f", e.g. at {rng.randrange(250, 900)} K"
    return s + "."


def wrap(words, width, rng):
    lines, line = [], ""
    for w in words.split(" "):
        if line and len(line) + 1 + len(w) > width:
            lines.append(line)
            line = w
        else:
            line = f"{line} {w}" if line else w
    if line:
        lines.append(line)
    return lines


def paragraph(rng):
    body = " ".join(sentence(rng) for _ in range(rng.randrange(3, 8)))
    lines = wrap(body, rng.randrange(60, 90), rng)
    if rng.random() < 0.2:
        lines.insert(rng.randrange(len(lines) + 1), rng.choice(FORMULAS))
    if rng.random() < 0.1:
        lines.insert(rng.randrange(len(lines) + 1), rng.choice(NON_ASCII))
    return "\n".join(lines)


def page(rng):
    return "\n\n".join(paragraph(rng) for _ in range(rng.randrange(3, 6))) + "\n"


def reference_page(rng):
    refs = []
    for i in range(rng.randrange(8, 14)):
        a, b = rng.sample(AUTHORS, 2)
        refs.append(f"[{i + 1}] {a}, {b[0]}., Journal of Nuclear Materials {rng.randrange(100, 500)} "
                    f"({rng.randrange(1965, 2019)}) {rng.randrange(1, 900)}.")
    return "REFERENCES\n" + "\n".join(refs) + "\n"


def document(rng):
    pages = [page(rng) for _ in range(rng.randrange(3, 7))]
    pages += [reference_page(rng), reference_page(rng)]
    return "\f".join(pages)


QA_PARAGRAPHS = [
    ("Tellurium is a fission product that is known to attack the cladding from inside. "
     "The cladding of the fuel pins is made of zircaloy. Tellurium penetrates along the grain "
     "boundaries of the cladding.",
     [("What attacks the cladding from inside?", "Tellurium"),
      ("What is the cladding made of?", "zircaloy"),
      ("Where does tellurium penetrate?", "along the grain boundaries of the cladding")]),
    ("The finite element method was used to model the thermal behaviour of the fuel pin. "
     "The model of Walters and Cockraft predicts the creep of the pressure tube.",
     [("Which method was used to model the fuel pin?", "finite element method"),
      ("Whose model predicts pressure tube creep?", "Walters and Cockraft")]),
    ("Boron carbide is used as the neutron absorber in the control rods. "
     "Cerium is used as a surrogate for plutonium in the fabrication trials.",
     [("What is the neutron absorber?", "Boron carbide"),
      ("What is used as a surrogate for plutonium?", "Cerium")]),
]


def qa_table():
    rows = ["paragraph,question,answer"]
    for text, qas in QA_PARAGRAPHS:
        for q, a in qas:
            rows.append(",".join('"' + f.replace('"', '""') + '"' for f in (text, q, a)))
    return "\n".join(rows) + "\n"


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=20200101)
    parser.add_argument("--documents", type=int, default=11)
    parser.add_argument("--root", type=Path, default=Path(__file__).resolve().parent.parent / "data")
    args = parser.parse_args()

    rng = random.Random(args.seed)
    corpus_dir = args.root / "sample_corpus"
    corpus_dir.mkdir(parents=True, exist_ok=True)
    for old in corpus_dir.glob("*.txt"):
        old.unlink()
    for i in range(args.documents):
        (corpus_dir / f"report_{i:02d}.txt").write_bytes(document(rng).encode("utf-8"))

    (args.root / "sample_qa.csv").write_bytes(qa_table().encode("utf-8"))


if __name__ == "__main__":
    main()
