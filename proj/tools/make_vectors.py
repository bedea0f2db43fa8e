"""Writes fixtures/vectors.txt from hand-chosen semantic features.

Each word is a sparse bundle of named features plus a small deterministic
perturbation so no two words are collinear.
"""
import math
import random
import sys

DIMS = ["human", "young", "learner", "named", "female", "male", "readable",
        "periodical", "sweet", "object", "commerce", "read", "give", "laugh",
        "container", "egg", "function", "risk", "place", "animal"]

WORDS = {
    "student": {"human": 1, "young": .3, "learner": 1.4},
    "students": {"human": 1, "young": .3, "learner": 1.4},
    "teacher": {"human": 1, "learner": .5, "readable": .2},
    "pupil": {"human": 1, "young": .9, "learner": 1.1},
    "child": {"human": 1, "young": 1.6},
    "children": {"human": 1, "young": 1.6},
    "john": {"human": 1.2, "named": 1.0, "male": .5},
    "mary": {"human": 1.2, "named": 1.0, "female": .5},
    "man": {"human": 1, "male": 1},
    "woman": {"human": 1, "female": 1},
    "shopkeeper": {"human": .8, "commerce": 1.2, "place": .3},
    "book": {"readable": 1.2, "object": .6},
    "books": {"readable": 1.2, "object": .6},
    "novel": {"readable": 1.3, "object": .4},
    "paper": {"readable": 1, "periodical": .6, "object": .5},
    "letter": {"readable": 1, "object": .7},
    "magazine": {"readable": .9, "periodical": 1.1, "object": .5},
    "newspaper": {"readable": .9, "periodical": 1.2, "object": .4},
    "sweets": {"sweet": 1.3, "object": .5, "egg": .1},
    "cake": {"sweet": 1.1, "object": .5, "egg": .3},
    "flowers": {"object": 1, "sweet": .2, "place": .2},
    "gift": {"object": 1.1, "sweet": .3, "commerce": .2},
    "read": {"read": 1.4, "readable": .4},
    "reads": {"read": 1.4, "readable": .4},
    "gives": {"give": 1.4, "commerce": .2},
    "give": {"give": 1.4, "commerce": .2},
    "laughed": {"laugh": 1.5, "human": .2},
    "slept": {"laugh": .5, "human": .2, "place": .5},
    "shop": {"commerce": 1.1, "place": 1},
    "good": {"commerce": .9, "object": .9},
    "goods": {"commerce": .9, "object": .9},
    "pay": {"commerce": 1.3, "give": .4},
    "sells": {"commerce": 1.2, "give": .6},
    "put": {"object": .4, "place": .3, "give": .2, "risk": .5},
    "all": {"function": 1.2},
    "the": {"function": 1.3},
    "a": {"function": 1.3, "object": .1},
    "in": {"function": 1, "place": .5},
    "one": {"function": 1, "object": .2},
    "eggs": {"egg": 1.3, "object": .5, "sweet": .2},
    "egg": {"egg": 1.3, "object": .5, "sweet": .2},
    "basket": {"container": 1.3, "object": .6},
    "risk": {"risk": 1.4},
    "spill": {"risk": .4, "object": .4, "place": .4},
    "beans": {"egg": .4, "object": .6, "sweet": .4},
    "dog": {"animal": 1.3, "young": .2},
}


def main(path):
    rng = random.Random(17)
    lines = []
    for word in sorted(WORDS):
        feats = WORDS[word]
        v = [feats.get(d, 0.0) + rng.uniform(0.0, 0.08) for d in DIMS]
        lines.append(word + " " + " ".join("%.4f" % x for x in v))
    with open(path, "w") as out:
        out.write("%d %d\n" % (len(lines), len(DIMS)))
        out.write("\n".join(lines) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "fixtures/vectors.txt")
