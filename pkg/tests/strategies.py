from hypothesis import strategies as st

from thicket import ConceptClass


@st.composite
def classes(draw, max_domain=4, max_concepts=8, min_domain=1):
    n = draw(st.integers(min_domain, max_domain))
    masks = draw(
        st.lists(st.integers(0, (1 << n) - 1), min_size=1, max_size=min(max_concepts, 1 << n), unique=True)
    )
    return ConceptClass(n, tuple(masks))
