"""Regenerates the shipped JSON Lines fixtures. Output is deterministic."""
import json
import pathlib

HERE = pathlib.Path(__file__).parent
BAO = "http://www.bioassayontology.org/bao#"

PROPERTIES = [
    ("has assay method", "BAO_0000212"),
    ("has detection method", "BAO_0000207"),
    ("has assay format", "BAO_0000205"),
    ("has bioassay type", "BAO_0002854"),
    ("has organism", "BAO_0002921"),
    ("has target", "BAO_0000211"),
    ("has assay control", "BAO_0000338"),
    ("has signal direction", "BAO_0002855"),
    ("has assay kit", "BAO_0002663"),
    ("uses detection instrument", "BAO_0000196"),
    ("has participant", "BAO_0000540"),
    ("has cell line", "BAO_0002800"),
]

SHARED = [
    ("has assay method", "reporter gene"),
    ("has detection method", "luminescence"),
    ("has organism", "homo sapiens"),
    ("has signal direction", "signal decrease"),
    ("has assay control", "positive control"),
]


def statements(count, offset, shared):
    out = [dict(property=p, value=v, property_uri=BAO + dict(PROPERTIES)[p])
           for p, v in SHARED[:shared]]
    i = 0
    while len(out) < count:
        prop, code = PROPERTIES[(offset + i) % len(PROPERTIES)]
        out.append(dict(property=prop, value=f"{prop.split()[-1]} variant {offset + i}",
                        property_uri=BAO + code))
        i += 1
    return out


def three_assays():
    rows = [
        dict(id="AID-1001", title="Firefly luciferase counterscreen",
             text="Luciferase reporter gene assay measuring inhibition in HEK293 cells.",
             statements=statements(5, 0, 5), assay_type="luciferase reporter gene",
             assay_format="cell-based format"),
        dict(id="AID-1002", title="Kinase activity panel",
             text="Biochemical kinase activity assay with luminescence readout of ATP depletion.",
             statements=statements(53, 100, 3), assay_type="kinase activity",
             assay_format="biochemical format"),
        dict(id="AID-1003", title="Cell viability screen",
             text="Cell viability measured by luminescence after 48 hour compound exposure.",
             statements=statements(92, 300, 2), assay_type="viability",
             assay_format="cell-based format"),
    ]
    return rows


def six_assays():
    def st(pairs):
        return [dict(property=p, value=v) for p, v in pairs]

    reporter = ("has assay method", "reporter gene")
    return [
        dict(id="S1", text="Firefly luciferase reporter construct in HEK293 cells.",
             statements=st([reporter, ("has detection method", "luminescence")])),
        dict(id="S2", text="A luciferase reporter readout after agonist stimulation.",
             statements=st([reporter, ("has organism", "homo sapiens")])),
        dict(id="S3", text="Dual luciferase reporter normalised to renilla signal.",
             statements=st([reporter, ("has detection method", "luminescence")])),
        dict(id="S4", text="Fluorescence polarization binding of a labelled peptide.",
             statements=st([("has assay method", "binding assay"),
                            ("has detection method", "fluorescence polarization")])),
        dict(id="S5", text="Alpha screen proximity binding between tagged proteins.",
             statements=st([("has assay method", "binding assay"),
                            ("has organism", "homo sapiens")])),
        dict(id="S6", text="Cell titer glo viability after compound exposure.",
             statements=st([("has assay method", "cell viability assay"),
                            ("has detection method", "luminescence")])),
    ]


def write(name, rows):
    with open(HERE / name, "w", encoding="utf-8") as f:
        for row in rows:
            f.write(json.dumps(row, sort_keys=False) + "\n")


if __name__ == "__main__":
    write("three_assays.jsonl", three_assays())
    write("six_assays.jsonl", six_assays())
