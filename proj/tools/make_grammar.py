"""Writes the fixture grammars under fixtures/.

dcxg.json is the main grammar. inflated_fan.json shares the cue words of
one idiom with several frames so its fan pushes activation below the
recognition threshold.
"""
import json
import sys

READERS = [["student", 1], ["teacher", 1], ["mary", 1], ["john", 1], ["child", 1]]
TEXTS = [["book", 1], ["novel", 1], ["paper", 1], ["letter", 1]]
GIVERS = [["mary", 1], ["john", 1], ["woman", 1], ["man", 1], ["teacher", 1]]
RECIPIENTS = [["john", 1], ["mary", 1], ["child", 1], ["student", 1]]
THEMES = [["book", 1], ["sweets", 1], ["gift", 1], ["flowers", 1]]
SELLERS = [["shopkeeper", 1], ["man", 1], ["woman", 1]]
GOODS = [["goods", 1], ["cake", 1], ["flowers", 1], ["sweets", 1]]
FINITE = {"type": "V", "vf": "fin", "inv": "-", "aux": "-"}

# lexemes, frame, vector word; frame None for proper names.
NOUNS = [
    (["student", "students"], "student-fr", "student"),
    (["teacher", "teachers"], "teacher-fr", "teacher"),
    (["pupil", "pupils"], "pupil-fr", "pupil"),
    (["child", "children"], "child-fr", "child"),
    (["man"], "man-fr", "man"),
    (["woman"], "woman-fr", "woman"),
    (["shopkeeper"], "shopkeeper-fr", "shopkeeper"),
    (["book", "books"], "book-fr", "book"),
    (["novel"], "novel-fr", "novel"),
    (["paper"], "paper-fr", "paper"),
    (["letter"], "letter-fr", "letter"),
    (["magazine"], "magazine-fr", "magazine"),
    (["newspaper"], "newspaper-fr", "newspaper"),
    (["sweets"], "sweets-fr", "sweets"),
    (["cake"], "cake-fr", "cake"),
    (["flowers"], "flowers-fr", "flowers"),
    (["gift"], "gift-fr", "gift"),
    (["goods"], "goods-fr", "goods"),
    (["egg", "eggs"], "egg-fr", "eggs"),
    (["basket"], "basket-fr", "basket"),
    (["dog"], "dog-fr", "dog"),
    (["john"], None, "john"),
    (["mary"], None, "mary"),
]


def np(case, gf, vec, fillers, extra=None):
    sign = {
        "form": {"syn": {"cat": {"type": "N", "case": case}, "gf": gf}},
        "meaning": {"sem": {"ds-vector": {"vec": vec, "fillers": fillers}}},
    }
    if extra:
        sign["meaning"]["sem"].update(extra)
    return sign


def noun(lexemes, frame, vec):
    sem = {"ind": {"#1": "index"}, "ds-vector": {"vec": vec}}
    if frame:
        sem["frames"] = [{"@type": frame, "entity": "#1"}]
    else:
        sem["frames"] = []
    return {
        "lexemes": lexemes,
        "form": {"syn": {"cat": {"type": "N", "case": None}, "val": []}},
        "meaning": {"sem": sem},
    }


def verb(lexemes, vec, slots, frame, roles):
    tags = ["#%d" % (i + 1) for i in range(len(slots))]
    frame_fs = {"@type": frame}
    frame_fs.update({role: tag for role, tag in zip(roles, tags)})
    return {
        "lexemes": lexemes,
        "supertypes": ["subject-predicate-cx"],
        "form": {"syn": {"cat": dict(FINITE), "val": tags}},
        "arg-st": [{tag: slot} for tag, slot in zip(tags, slots)],
        "meaning": {"sem": {"frames": [frame_fs], "ds-vector": {"vec": vec}}},
    }


def main_grammar():
    cx = {}
    cx["subject-predicate-cx"] = {
        "form": {"syn": {"cat": {"#1": dict(FINITE)},
                         "val": [{"form": {"syn": {"gf": "subj"}}}, "..."]}},
        "cues": {"syntactic": [{"tag": "#1"}]},
    }
    cx["det-noun-cx"] = {
        "form": {"syn": {"cat": {"type": "N"},
                         "spr": {"form": {"syn": {"cat": {"type": "Det"}}}}}},
        "cues": {"syntactic": [{"path": "form.syn.cat.type", "value": "Det", "weight": "soft"}]},
    }
    for lexemes, frame, vec in NOUNS:
        cx[lexemes[0] + "-lexeme-cx"] = noun(lexemes, frame, vec)
    cx["a-lexeme-cx"] = {
        "lexemes": ["a", "an"],
        "form": {"syn": {"cat": {"type": "Det", "select": {"type": "N"}}, "val": []}},
        "meaning": {"sem": {"def": "-"}},
    }
    cx["the-lexeme-cx"] = {
        "lexemes": ["the"],
        "form": {"syn": {"cat": {"type": "Det", "select": {"type": "N"}}, "val": []}},
        "meaning": {"sem": {"def": "+"}},
    }
    cx["read-lexeme-cx"] = verb(
        ["read", "reads"], "read",
        [np("nom", "subj", "reader", READERS), np("acc", "obj", "text", TEXTS)],
        "reading-fr", ["reader", "text"])
    cx["gives-lexeme-cx"] = verb(
        ["gives", "give"], "gives",
        [np("nom", "subj", "giver", GIVERS), np("acc", "obl", "recipient", RECIPIENTS),
         np("acc", "obj", "theme", THEMES)],
        "giving-fr", ["agent", "recipient", "theme"])
    cx["sells-lexeme-cx"] = verb(
        ["sells"], "sells",
        [np("nom", "subj", "seller", SELLERS), np("acc", "obj", "goods", GOODS)],
        "selling-fr", ["seller", "goods"])
    laughed = {
        "lexemes": ["laughed"],
        "supertypes": ["subject-predicate-cx"],
        "form": {"syn": {"cat": dict(FINITE), "val": ["#1"]}},
        "arg-st": [{"#1": {"form": {"syn": {"cat": {"type": "N", "case": "nom"}, "gf": "subj"}},
                           "meaning": {"sem": {"ind": {"#2": "index"}}}}}],
        "meaning": {"sem": {"frames": [{"@type": "laughing-fr", "agt": "#2"}],
                            "ds-vector": {"vec": "laughed"}}},
    }
    cx["laughed-lexeme-cx"] = laughed
    slept = json.loads(json.dumps(laughed))
    slept["lexemes"] = ["slept"]
    slept["meaning"]["sem"]["frames"][0]["@type"] = "sleeping-fr"
    slept["meaning"]["sem"]["ds-vector"]["vec"] = "slept"
    cx["slept-lexeme-cx"] = slept
    cx["ditransitive-cx"] = {
        "form": {
            "syn": {"cat": {"#1": {"type": "V"}}},
            "properties": {
                "lin": [{"args": ["#2", "#1"], "weight": "soft"}, ["#1", "#3", "#4"]],
                "adj": [["#1", "#3", "#4"]],
            },
        },
        "arg-st": [{"#2": None}, {"#3": None}, {"#4": None}],
        "meaning": {"sem": {"frames": [{"@type": "transfer-fr", "agent": "#2",
                                        "recipient": "#3", "theme": "#4"}]}},
        "cues": {"syntactic": [{"property": "lin:0", "weight": "soft"}, {"property": "lin:1"},
                               {"property": "lin:2"}, {"property": "adj"}]},
    }
    cx["put-all-eggs-cx"] = {
        "form": {
            "surface_form": [{"#1": "put"}, {"#2": "all"}, {"#3": "eggs"}, "in", "one", "basket"],
            "properties": {"lin": [["#1", "#2", "#3"]], "adj": [["#1", "#2", "#3"]]},
        },
        "meaning": {"sem": {"frames": [{"@type": "take-a-risk-fr", "agent": None,
                                        "venture": {"@type": "plan"}}]}},
        "opaque_meaning": True,
        "cues": {"lexical": ["#1", "#2", "#3"],
                 "syntactic": [{"property": "lin"}, {"property": "adj"}]},
    }

    frames = {}
    for lexemes, frame, vec in NOUNS:
        if frame:
            frames[frame] = {"elements": {"entity": None}}
    frames["reading-fr"] = {"elements": {"reader": None, "text": None},
                            "lex_cues": [{"vec": "read"}]}
    frames["laughing-fr"] = {"elements": {"agt": None}}
    frames["sleeping-fr"] = {"elements": {"agt": None}}
    frames["transfer-fr"] = {"elements": {"agent": None, "recipient": None, "theme": None}}
    frames["giving-fr"] = {"elements": {"agent": None, "recipient": None, "theme": None},
                           "relations": [{"kind": "inheritance", "target": "transfer-fr"}]}
    frames["commercial-transaction-fr"] = {
        "elements": {"buyer": None, "seller": None, "goods": None, "money": None},
        "lex_cues": [{"vec": "shop"}, {"vec": "shopkeeper"}, {"vec": "good"}, {"vec": "pay"}],
    }
    frames["selling-fr"] = {"elements": {"seller": None, "goods": None},
                            "relations": [{"kind": "perspective",
                                           "target": "commercial-transaction-fr"}]}
    frames["take-a-risk-fr"] = {"elements": {"agent": None, "venture": None}}

    events = {
        "student-read-event": {
            "specialize": "read-lexeme-cx",
            "trigger": {"lexical": [{"vec": "student"}, {"cue": "read"}]},
            "refinement": {"arg-st": [
                {"meaning": {"sem": {"frames": [{"@type": "student-fr", "entity": None}],
                                     "ds-vector": {"vec": "student"}}}},
                {"meaning": {"sem": {"frames": [{"@type": "book-fr", "entity": None}],
                                     "ds-vector": {"vec": "book"}}}},
            ]},
        },
        "children-sweets-event": {
            "specialize": "ditransitive-cx",
            "trigger": {"lexical": [{"vec": "children"}]},
            "refinement": {"arg-st": [
                None,
                {"meaning": {"sem": {"ds-vector": {"vec": "children"}}}},
                {"meaning": {"sem": {"frames": [{"@type": "sweets-fr", "entity": None}],
                                     "ds-vector": {"vec": "sweets"}}}},
            ]},
        },
        "corner-shop-event": {
            "specialize": "commercial-transaction-fr",
            "trigger": {"lexical": [{"vec": "shopkeeper"}]},
            "refinement": {"seller": {"meaning": {"sem": {"ds-vector": {"vec": "shopkeeper"}}}},
                           "place": "corner-shop"},
        },
    }
    return {"hierarchy": {}, "constructions": cx, "frames": frames, "events": events}


def inflated_fan_grammar():
    def idiom(words, frame):
        tags = ["#%d" % (i + 1) for i in range(len(words))]
        return {
            "form": {"surface_form": [{t: w} for t, w in zip(tags, words)]},
            "meaning": {"sem": {"frames": [{"@type": frame, "agent": None}]}},
            "opaque_meaning": True,
            "cues": {"lexical": tags},
        }

    frames = {
        "reveal-secret-fr": {"elements": {"agent": None}},
        "be-idle-fr": {"elements": {"agent": None}},
        "liquid-fr": {"elements": {}, "lex_cues": [{"cue": "spill"}, {"cue": "beans"}]},
        "legume-fr": {"elements": {}, "lex_cues": [{"cue": "spill"}, {"cue": "beans"}]},
        "mess-fr": {"elements": {}, "lex_cues": [{"cue": "spill"}, {"cue": "beans"}]},
    }
    return {
        "hierarchy": {},
        "constructions": {
            # Cue words shared with three frames: fan 4 for each cue.
            "spill-beans-cx": idiom(["spill", "beans"], "reveal-secret-fr"),
            # Control: cue words used nowhere else, fan 1.
            "twiddle-thumbs-cx": idiom(["twiddle", "thumbs"], "be-idle-fr"),
        },
        "frames": frames,
        "events": {},
    }


if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "fixtures"
    for name, g in (("dcxg.json", main_grammar()), ("inflated_fan.json", inflated_fan_grammar())):
        with open("%s/%s" % (out, name), "w") as f:
            json.dump(g, f, indent=2)
            f.write("\n")
