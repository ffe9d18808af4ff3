"""Generator of correct seed methods for the mutant corpus.

Each template fixes the control flow and the operators; identifiers, constants and a
few declared types are drawn at random, so a single template yields many distinct
methods that share the same idioms.
"""
from __future__ import annotations

import numpy as np

from .lang import parse, render

PREFIXES = ["max", "min", "next", "prev", "current", "last", "first", "base", "new", "old",
            "temp", "local", "best", "start", "end", "total", "raw", "safe"]
NOUNS = ["item", "value", "count", "index", "size", "limit", "score", "price", "node", "key",
         "level", "width", "height", "offset", "step", "delta", "weight", "rate", "amount", "depth"]
VERBS = ["compute", "find", "check", "get", "update", "resolve", "count", "scan", "pick", "apply"]
CLASSES = ["List", "Buffer", "Queue", "Table", "Registry", "Cache"]

TEMPLATES = {
    "sum_range": """
int {f}(int {a}, int {b}) {{
    int {c} = 0;
    for (int {i} = {a}; {i} < {b}; {i} = {i} + 1) {{ {c} = {c} + {i}; }}
    return {c};
}}""",
    "clamp": """
int {f}(int {a}, int {b}, int {c}) {{
    if ({a} < {b}) {{ return {b}; }}
    if ({a} > {c}) {{ return {c}; }}
    return {a};
}}""",
    "max_of_two": """
{T} {f}({T} {a}, {T} {b}) {{
    if ({a} >= {b}) {{ return {a}; }}
    return {b};
}}""",
    "in_range": """
boolean {f}(int {a}, int {b}, int {c}) {{
    return {a} >= {b} && {a} <= {c};
}}""",
    "contains": """
boolean {f}({C} {a}, int {b}) {{
    boolean {c} = false;
    for (int {i} = 0; {i} < {a}.size(); {i} = {i} + 1) {{
        if ({a}.get({i}) == {b}) {{ {c} = true; }}
    }}
    return {c};
}}""",
    "average": """
double {f}(double {a}, int {b}) {{
    if ({b} == 0) {{ return 0.0; }}
    return {a} / {b};
}}""",
    "is_even": """
boolean {f}(int {a}) {{
    return {a} % {n2} == 0;
}}""",
    "abs": """
{T} {f}({T} {a}) {{
    if ({a} < 0) {{ return -{a}; }}
    return {a};
}}""",
    "is_blank": """
boolean {f}(String {a}) {{
    return {a} == null || {a}.length() == 0;
}}""",
    "power": """
long {f}(long {a}, int {b}) {{
    long {c} = 1;
    int {i} = 0;
    while ({i} < {b}) {{
        {c} = {c} * {a};
        {i} = {i} + 1;
    }}
    return {c};
}}""",
    "count_positive": """
int {f}({C} {a}) {{
    int {c} = 0;
    for (int {i} = 0; {i} < {a}.size(); {i} = {i} + 1) {{
        if ({a}.get({i}) > 0) {{ {c} = {c} + 1; }}
    }}
    return {c};
}}""",
    "guard_flag": """
boolean {f}(boolean {a}, int {b}) {{
    if (!{a}) {{ return false; }}
    return {b} > 0;
}}""",
    "area": """
double {f}(double {a}, double {b}) {{
    double {c} = {a} * {b};
    return {c} / {n2};
}}""",
    "bounded_max": """
int {f}(int {a}, int {b}) {{
    int {c} = Math.max({a}, {b});
    return Math.min({c}, {n100});
}}""",
    "is_digit": """
boolean {f}(char {a}) {{
    return {a} >= '0' && {a} <= '9';
}}""",
    "join": """
String {f}(String {a}, String {b}) {{
    if ({a}.isEmpty()) {{ return {b}; }}
    return {a} + ", " + {b};
}}""",
    "reset": """
void {f}({C} {a}, int {b}) {{
    {a}.{g} = {b};
    {a}.{h} = false;
    {a}.{k}({b}, true);
}}""",
    "sign": """
int {f}(int {a}) {{
    if ({a} > 0) {{ return 1; }} else if ({a} < 0) {{ return -1; }}
    return 0;
}}""",
    "has_flag": """
boolean {f}(int {a}, int {b}) {{
    return ({a} & {b}) != 0;
}}""",
    "gcd": """
int {f}(int {a}, int {b}) {{
    while ({b} != 0) {{
        int {c} = {a} % {b};
        {a} = {b};
        {b} = {c};
    }}
    return {a};
}}""",
    "validate": """
boolean {f}(String {a}, int {b}) {{
    return !{a}.isEmpty() && {b} >= {n18};
}}""",
    "fib": """
long {f}(int {a}) {{
    long {b} = 0;
    long {c} = 1;
    for (int {i} = 0; {i} < {a}; {i} = {i} + 1) {{
        long {d} = {b} + {c};
        {b} = {c};
        {c} = {d};
    }}
    return {b};
}}""",
    "scaled": """
float {f}(float {a}, int {b}, boolean {c}) {{
    float {d} = {a} * {b};
    if ({c}) {{ {d} = {d} - {n2}; }}
    return {d};
}}""",
    "find_index": """
int {f}({C} {a}, int {b}) {{
    for (int {i} = 0; {i} < {a}.size(); {i} = {i} + 1) {{
        if ({a}.get({i}) == {b}) {{ return {i}; }}
    }}
    return -1;
}}""",
    "all_positive": """
boolean {f}({C} {a}) {{
    boolean {c} = true;
    for (int {i} = 0; {i} < {a}.size(); {i} = {i} + 1) {{
        if ({a}.get({i}) <= 0) {{ {c} = false; }}
    }}
    return {c};
}}""",
    "exclusive": """
boolean {f}(boolean {a}, boolean {b}) {{
    if ({a} && !{b}) {{ return true; }}
    return false;
}}""",
    "retry": """
boolean {f}(int {a}, boolean {b}) {{
    boolean {c} = {b};
    while ({a} > 0 && !{c}) {{
        {c} = {k}({a}, false);
        {a} = {a} - 1;
    }}
    return {c};
}}""",
    "valid_index": """
boolean {f}({C} {a}, int {b}) {{
    if ({b} < 0 || {b} >= {a}.size()) {{ return false; }}
    return true;
}}""",
}


def _name(rng: np.random.Generator, taken: set[str]) -> str:
    while True:
        noun = NOUNS[rng.integers(len(NOUNS))]
        if rng.random() < 0.4:
            name = noun
        else:
            name = PREFIXES[rng.integers(len(PREFIXES))] + noun.capitalize()
        if name not in taken:
            taken.add(name)
            return name


def seed_method(template: str, rng: np.random.Generator) -> str:
    """Instantiate one template with random names and constants, in canonical layout."""
    taken: set[str] = set()
    fields = {key: _name(rng, taken) for key in ("a", "b", "c", "d", "g", "h")}
    fields["i"] = ["i", "j", "k", "idx"][rng.integers(4)]
    taken.add(fields["i"])
    verb = VERBS[rng.integers(len(VERBS))]
    name = _name(rng, taken)
    fields["f"] = verb + name[0].upper() + name[1:]
    fields["k"] = VERBS[rng.integers(len(VERBS))] + NOUNS[rng.integers(len(NOUNS))].capitalize()
    fields["T"] = ["int", "long", "double"][rng.integers(3)]
    fields["C"] = CLASSES[rng.integers(len(CLASSES))]
    fields["n2"] = str(int(rng.integers(2, 10)))
    fields["n18"] = str(int(rng.integers(10, 30)))
    fields["n100"] = str(int(rng.integers(50, 500)))
    return render(parse(TEMPLATES[template].format(**fields)))


def generate_seed_methods(count: int, seed: int) -> list[str]:
    """``count`` distinct seed methods cycling through every template."""
    rng = np.random.default_rng(seed)
    names = sorted(TEMPLATES)
    out, seen = [], set()
    attempts = 0
    while len(out) < count:
        src = seed_method(names[attempts % len(names)], rng)
        attempts += 1
        if src not in seen:
            seen.add(src)
            out.append(src)
        if attempts > 50 * count:
            raise RuntimeError("seed generator ran out of distinct methods")
    return out
