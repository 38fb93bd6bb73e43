"""Tour of the canonical corpus format: annotation layers of one dialog.

Loads the small bundled restaurant corpus and walks through what every turn
carries — raw user tokens, the delexicalized form with its inverse bindings,
the tracked belief state, the system dialog acts and the (delexicalized)
system response — then shows how the belief state selects database rows.

Run:  python3 demos/01_corpus_tour.py
"""

from pathlib import Path

import dialaug
from dialaug import load_canonical, serialize_acts

CORPUS = Path(dialaug.__file__).parent / "data" / "mini_corpus.json"


def section(title: str) -> None:
    print(f"\n=== {title} ===")


def main() -> None:
    corpus = load_canonical(CORPUS)

    section("corpus at a glance")
    onto = corpus.ontology
    print(f"dialogs: {len(corpus.dialogs)}   turns: {sum(len(d.turns) for d in corpus.dialogs)}")
    print(f"domains: {onto.domains}")
    for domain in onto.domains:
        for slot, spec in sorted(onto.slots[domain].items()):
            kind = "+".join(k for k, on in (("informable", spec.informable), ("requestable", spec.requestable)) if on)
            print(f"  {domain}.{slot}: {kind}")
    print(f"database records: {len(corpus.database)}")

    dialog = corpus.get_dialog("d01")
    section(f"dialog {dialog.id}: goal")
    for (domain, slot), value in sorted(dialog.goal.constraints.items()):
        print(f"  constrain {domain}.{slot} = {value}")
    for domain, slot in sorted(dialog.goal.requested):
        print(f"  request   {domain}.{slot}")

    for turn in dialog.turns:
        section(f"dialog {dialog.id}, turn {turn.index}")
        print(f"user          : {' '.join(turn.user)}")
        print(f"user (delex)  : {' '.join(turn.user_delex.tokens)}")
        for b in turn.user_delex.bindings:
            print(f"    [{b.slot}] at position {b.position} covered {' '.join(b.surface)!r}")
        informed = ", ".join(f"{d}.{s}={v}" for (d, s), v in sorted(turn.state.informed.items()))
        requested = ", ".join(f"{d}.{s}" for d, s in sorted(turn.state.requested))
        print(f"belief        : informed [{informed}]  requested [{requested}]")
        print(f"system acts   : {' '.join(serialize_acts(turn.sys_acts))}")
        print(f"response      : {' '.join(turn.response)}")
        print(f"resp. (delex) : {' '.join(turn.response_delex.tokens)}")

    section("database rows matching the final belief state")
    final = dialog.turns[-1].state.informed
    wanted = {slot: value for (_d, slot), value in final.items()}
    for row in corpus.database:
        if all(row.get(slot) == value for slot, value in wanted.items()):
            print(f"  {row}")
    print("\nTakeaway: every layer the models consume — delexicalized text,")
    print("belief states, acts, database grounding — lives in one JSON file.")


if __name__ == "__main__":
    main()
