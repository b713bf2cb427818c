"""Train 2D ball embeddings for a small family ontology and inspect them.

The knowledge base relates Person, Male, Female, Parent, Father, and
Mother through subsumptions, a disjointness, two conjunctions, and a
hasChild relation. In two dimensions the learned balls can be checked
(and plotted) directly: Female and Male separate, Father nests inside
Male and Parent, and hasChild acts as a translation.

Run with: python3 demos/family_domain.py
"""

from elball.dataio import Checkpoint, export_2d, format_export_2d
from elball.family import FAMILY_KB, family_ontology
from elball.geometry import check_model
from elball.normalizer import eliminate_abox, normalize
from elball.trainer import TrainConfig, train


def main():
    print("Knowledge base:")
    print(FAMILY_KB)

    theory = normalize(eliminate_abox(family_ontology()))
    print("Normal-form bucket sizes:", theory.counts())

    cfg = TrainConfig(
        dim=2, margin=0.0, epochs=2000, batch_size=16, learning_rate=0.01, seed=42
    )
    print(f"\nTraining: dim={cfg.dim}, margin={cfg.margin}, {cfg.epochs} epochs ...")
    e, trace = train(theory, cfg)
    print(f"final minibatch loss: {trace.minibatch[-1]:.4f}")

    result = check_model(theory, e, tol=0.1)
    print(f"\nGeometric check at tolerance 0.1: overall={result.overall}")
    for check in result.checks:
        flag = "info" if check.informational else ("ok" if check.satisfied else "VIOLATED")
        print(f"  [{flag:8s}] {check.form:4s} {check.text} (violation {check.violation:.4f})")

    ckpt = Checkpoint(e, list(theory.classes), list(theory.relations), {"dim": 2})
    print("\nPlot-ready table (class, x, y, radius):")
    print(format_export_2d(export_2d(ckpt)))


if __name__ == "__main__":
    main()
