from fractions import Fraction


def parse_fraction(text: str) -> Fraction:
    """Parse '1/64', '0.25' or '3' exactly."""
    try:
        value = Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not an exact rational: '{text}' (expected e.g. 1/64 or 0.25)") from exc
    return value


def parse_fraction_list(text: str) -> list[Fraction]:
    items = [s for s in str(text).split(",") if s.strip()]
    if not items:
        raise ValueError(f"empty list: '{text}'")
    return [parse_fraction(s) for s in items]


def fraction_str(value: Fraction) -> str:
    value = Fraction(value)
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"
