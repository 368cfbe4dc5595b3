import pytest

from polyreglab.langlab import enumerate_image, resolve_function


@pytest.fixture(scope="session")
def dcomplete_samples():
    """Prime (lifted, length 6) and base (length 4) image samples for both
    builtin interpretations.  Enumerating the lifted image is the slowest
    thing the suite does, so the result is shared across test modules."""
    samples = {}
    for name in ("squaring-family", "innsq-interp"):
        base_fn = resolve_function(f"interp:{name}")
        prime_fn = resolve_function(f"psi:{name}")
        prime = enumerate_image(
            prime_fn.fn, prime_fn.input_alphabet, 6, function_id=f"psi:{name}"
        )
        base = enumerate_image(
            base_fn.fn, base_fn.input_alphabet, 4, function_id=f"interp:{name}"
        )
        samples[name] = (prime, base)
    return samples


@pytest.fixture(scope="session")
def reverse_blocks_samples():
    rf = resolve_function("2dft:reverse-blocks-ab")
    short = enumerate_image(rf.fn, rf.input_alphabet, 4, function_id=rf.ref)
    extended = enumerate_image(rf.fn, rf.input_alphabet, 10, function_id=rf.ref)
    return short, extended
