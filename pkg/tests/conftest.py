import pytest

from fixloc.mutation import ALL_KINDS, generate_corpus
from fixloc.seeds import generate_seed_methods

FORMAT_EXCERPT = """
private String format(JSError error, boolean excerpt, String sourceExcerpt, int charno) {
    if (sourceExcerpt != null)
        if (excerpt.equals(LINE) && 0 <= charno && charno < sourceExcerpt.length()) {
            b.append(charno);
        }
    return b.toString();
}
"""

FIXED_EXCERPT = FORMAT_EXCERPT.replace("charno < sourceExcerpt", "charno <= sourceExcerpt")


@pytest.fixture(scope="session")
def seed_methods():
    return generate_seed_methods(300, 11)


@pytest.fixture(scope="session")
def small_corpus(seed_methods):
    """300 mutants, all six kinds in equal shares."""
    return generate_corpus(seed_methods, 300, {k: 1.0 for k in ALL_KINDS}, seed=5)
