//! Renders one canonical instance per schema: the placeholder binding applied
//! to a conclusion holding exactly the principal formulae.

use dlsequent::calculus::Calculus;

pub fn render(calc: &Calculus) -> String {
    let mut out = String::new();
    for schema in calc.cyclic_order() {
        let inst = schema.pattern();
        let premises = inst.apply(&inst.principal).expect("a rule applies to its own principal formulae");
        out += &format!("{} [{:?}]\n", schema.name, schema.class);
        out += &format!("  conclusion: {}\n", inst.principal);
        if premises.is_empty() {
            out += "  initial\n";
        }
        for p in premises {
            out += &format!("  premise: {p}\n");
        }
    }
    out
}
