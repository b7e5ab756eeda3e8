"""Tour of the expression layer: parsing, evaluation, differentiation.

Run:  python3 demos/expressions.py
"""

from solsurf import parse

SAMPLES = [
    "z^3 - 2*z + 1",
    "exp(z^2/2)",
    "sqrt(pi)*erf(z)",
    "(1+z)/(2-z)",
    "sin(z)*cosh(z)",
]


def main():
    print("parse / evaluate / differentiate")
    print("-" * 60)
    for text in SAMPLES:
        e = parse(text)
        d = e.derivative()
        print("f(z)  =", e)
        print("f'(z) =", d)
        print("f(1+0.5i) = %.12g%+.12gj" % (e.eval(1 + 0.5j).real,
                                            e.eval(1 + 0.5j).imag))
        print()

    print("parameters stay symbolic until bound")
    print("-" * 60)
    e = parse("exp(a*z) + b", params={"a", "b"})
    print("f(z)  =", e)
    print("f'(z) =", e.derivative())
    print("f(2) with a=0.5, b=1:", e.eval(2.0, params={"a": 0.5, "b": 1.0}))
    print()

    print("the derivative of the error function is the Gaussian")
    print("-" * 60)
    e = parse("erf(z)")
    print("erf'(z) =", e.derivative())
    z = 0.8 + 0.1j
    fd = (e.eval(z + 1e-6) - e.eval(z - 1e-6)) / 2e-6
    print("finite difference at %s: %s" % (z, fd))
    print("closed form at %s:      %s" % (z, e.derivative().eval(z)))


if __name__ == "__main__":
    main()
