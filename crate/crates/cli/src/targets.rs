//! Built-in target functions for `fit` and `converge`.

use ps12::Point;

pub struct Target {
    pub name: &'static str,
    pub description: &'static str,
    pub f: fn(&Point) -> f64,
}

pub const TARGETS: &[Target] = &[
    Target { name: "sin-exp", description: "sin(x) exp(y)", f: |p| p.x.sin() * p.y.exp() },
    Target { name: "sin-x2y", description: "sin(x + 2y)", f: |p| (p.x + 2.0 * p.y).sin() },
    Target { name: "franke", description: "Franke's test function", f: franke },
    Target {
        name: "quintic",
        description: "x^5 - 2x^2 y^3 + x y + 1",
        f: |p| p.x.powi(5) - 2.0 * p.x.powi(2) * p.y.powi(3) + p.x * p.y + 1.0,
    },
    Target { name: "gaussian", description: "exp(-4 (x^2 + y^2))", f: |p| (-4.0 * (p.x * p.x + p.y * p.y)).exp() },
    Target { name: "one", description: "the constant 1", f: |_| 1.0 },
];

fn franke(p: &Point) -> f64 {
    let (x, y) = (9.0 * p.x, 9.0 * p.y);
    0.75 * (-((x - 2.0).powi(2) + (y - 2.0).powi(2)) / 4.0).exp()
        + 0.75 * (-(x + 1.0).powi(2) / 49.0 - (y + 1.0) / 10.0).exp()
        + 0.5 * (-((x - 7.0).powi(2) + (y - 3.0).powi(2)) / 4.0).exp()
        - 0.2 * (-(x - 4.0).powi(2) - (y - 7.0).powi(2)).exp()
}

pub fn lookup(name: &str) -> Option<&'static Target> {
    TARGETS.iter().find(|t| t.name == name)
}

pub fn names() -> String {
    TARGETS.iter().map(|t| format!("{} [{}]", t.name, t.description)).collect::<Vec<_>>().join(", ")
}
