"""Random bounded-integer loop programs for end-to-end soundness testing.

Every predicate has arity 2.  A program has a few ground facts and a set of
transition rules; each rule body calls one or two predicates, requires the
first argument of its first call to be below a bound and increases that
argument by a positive step.  Every derivation step therefore raises the
first argument, so the ground model is finite even though the dependency
graph is full of cycles.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field


@dataclass(frozen=True)
class Rule:
    head: str
    src: str
    bound: int  # guard X < bound
    step: int  # X1 = X + step, step >= 1
    # second argument: ("shift", d) for Y1 = Y + d, ("mirror", k) for Y1 = k - Y,
    # ("join", other) for Y1 = Y + V where other(U, V) is a second call with U =< X
    update: tuple
    y_guard: int | None = None  # Y >= y_guard when set

    def to_text(self) -> str:
        body = [f"{self.src}(X, Y)"]
        kind, arg = self.update
        if kind == "join":
            body.append(f"{arg}(U, V)")
            body.append("U =< X")
        body.append(f"X < {self.bound}")
        if self.y_guard is not None:
            body.append(f"Y >= {self.y_guard}")
        body.append(f"X1 = X + {self.step}")
        if kind == "shift":
            body.append(f"Y1 = Y + {arg}" if arg >= 0 else f"Y1 = Y - {-arg}")
        elif kind == "mirror":
            body.append(f"Y1 = {arg} - Y")
        else:
            body.append("Y1 = Y + V")
        return f"{self.head}(X1, Y1) :- {', '.join(body)}."


@dataclass
class RandomProgram:
    seed: int
    preds: list[str]
    facts: list[tuple[str, int, int]] = field(default_factory=list)
    rules: list[Rule] = field(default_factory=list)

    def to_text(self) -> str:
        lines = [f"% random loop program, seed {self.seed}"]
        lines += [f"{p}({x}, {y})." for p, x, y in self.facts]
        lines += [r.to_text() for r in self.rules]
        return "\n".join(lines) + "\n"


def generate(seed: int, n_preds: int | None = None) -> RandomProgram:
    rng = random.Random(seed)
    n = n_preds or rng.randint(1, 4)
    preds = [f"p{i}" for i in range(n)]
    prog = RandomProgram(seed, preds)
    for p in rng.sample(preds, rng.randint(1, n)):
        prog.facts.append((p, rng.randint(-2, 2), rng.randint(-3, 3)))
    for _ in range(rng.randint(n, 2 * n + 1)):
        kind = rng.choices(["shift", "mirror", "join"], weights=[5, 2, 1])[0]
        if kind == "shift":
            update = ("shift", rng.randint(-2, 2))
        elif kind == "mirror":
            update = ("mirror", rng.randint(-2, 4))
        else:
            update = ("join", rng.choice(preds))
        prog.rules.append(
            Rule(
                head=rng.choice(preds),
                src=rng.choice(preds),
                bound=rng.randint(2, 8),
                step=rng.randint(1, 2),
                update=update,
                y_guard=rng.choice([None, None, rng.randint(-3, 2)]),
            )
        )
    return prog


def read_seeds(path) -> list[int]:
    """Integers from a seeds file, one per line; ``#`` starts a comment."""
    seeds = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.split("#", 1)[0].strip()
            if line:
                seeds.append(int(line))
    return seeds
