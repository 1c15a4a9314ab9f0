"""Integrate the three reference loxodromes and set them against their closed forms."""

from rhumbforge import Family, example_fixture, integrate_loxodrome, max_angle_deviation

for ex_id in ("Ex1", "Ex2", "Ex3"):
    ex = example_fixture(ex_id)
    curve = integrate_loxodrome(ex.surface, ex.spec)
    lo, hi = ex.spec.span
    name = "y" if ex.spec.family is Family.MERIDIAN else "x"
    print(f"{ex_id}: {ex.spec.family.value} family, angle {ex.spec.angle:.6f}, {len(curve)} samples")
    print(f"  {name}(lo) = {curve.v[0]:.7g}  closed form {ex.closed_form(lo):.7g}")
    print(f"  {name}(hi) = {curve.v[-1]:.7g}  closed form {ex.closed_form(hi):.7g}")
    print(f"  arc length {curve.length:.7g}  published {ex.published_arc_length}")
    print(f"  worst |cos| deviation from the requested angle {max_angle_deviation(ex.surface, curve, ex.spec.angle):.1e}")
