"""Profile text, its symbolic derivative, and the metric of a twisted surface."""

import math

from rhumbforge import (ProfileCurve, TwistedSurface, differentiate, evaluate, parse_expression,
                        to_string)

tree = parse_expression("cos(y)^2 - sin(y/2)")
print("parsed    ", to_string(tree))
print("derivative", to_string(differentiate(tree)))
print("value at pi/3", evaluate(tree, math.pi / 3))

# a torus of tube radius 1 wound around the z axis at distance 3, turning once per revolution
surface = TwistedSurface(3.0, 1.0, ProfileCurve("cos(y)", "sin(y)", (0.0, 2 * math.pi)))
for x, y in [(0.0, 0.0), (1.0, 0.5), (2.0, 3.0)]:
    g = surface.metric(x, y)
    t_x, t_y = surface.partials(x, y)
    print(f"(x, y) = ({x}, {y})  g11={g.g11:.6f} g12={g.g12:+.6f} g22={g.g22:.6f}"
          f"  |g11 - T_x.T_x| = {abs(g.g11 - t_x @ t_x):.1e}")

# a profile that retraces itself reports where its orientation flips
retrace = ProfileCurve("cos(y)^2", "sin(y)^2", (math.pi / 16, 2 * math.pi / 3))
print("reversal at y =", retrace.reversals)
