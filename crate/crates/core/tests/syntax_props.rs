use proptest::prelude::*;
use reqc_core::fuzz::Generator;
use reqc_core::syntax::{parse_event, parse_requirement, render_event, render_textual, BinOp, Expr};

/// Precedence climbing over a flat token list, written independently of the
/// crate's parser: `=>` < `|` < `&` < `=` for booleans and `+ -` < `* /`
/// inside relations, all left-associative.
mod reference {
    use super::*;

    #[derive(Clone, Debug)]
    pub enum Tok {
        Var(String),
        Op(&'static str),
    }

    fn bool_prec(op: &str) -> Option<(u8, BinOp)> {
        match op {
            "=>" => Some((1, BinOp::Implies)),
            "|" => Some((2, BinOp::Or)),
            "&" => Some((3, BinOp::And)),
            "=" => Some((4, BinOp::Eq)),
            _ => None,
        }
    }

    fn arith_prec(op: &str) -> Option<(u8, BinOp)> {
        match op {
            "+" => Some((1, BinOp::Add)),
            "-" => Some((1, BinOp::Sub)),
            "*" => Some((2, BinOp::Mul)),
            "/" => Some((2, BinOp::Div)),
            _ => None,
        }
    }

    pub fn climb(
        toks: &[Tok],
        pos: &mut usize,
        min: u8,
        prec: fn(&str) -> Option<(u8, BinOp)>,
        atom: &mut dyn FnMut(&[Tok], &mut usize) -> Expr,
    ) -> Expr {
        let mut lhs = atom(toks, pos);
        while let Some(Tok::Op(op)) = toks.get(*pos) {
            let Some((p, bin)) = prec(op) else { break };
            if p < min {
                break;
            }
            *pos += 1;
            let rhs = climb(toks, pos, p + 1, prec, atom);
            lhs = Expr::binary(bin, lhs, rhs);
        }
        lhs
    }

    pub fn parse_bool(toks: &[Tok]) -> Expr {
        let mut pos = 0;
        let mut atom = |t: &[Tok], p: &mut usize| -> Expr {
            let mut nots = 0;
            while matches!(t.get(*p), Some(Tok::Op("not"))) {
                nots += 1;
                *p += 1;
            }
            let Tok::Var(v) = &t[*p] else { panic!("atom expected") };
            *p += 1;
            (0..nots).fold(Expr::var(v), |e, _| Expr::not(e))
        };
        climb(toks, &mut pos, 1, bool_prec, &mut atom)
    }

    pub fn parse_arith(toks: &[Tok]) -> Expr {
        let mut pos = 0;
        let mut atom = |t: &[Tok], p: &mut usize| -> Expr {
            let Tok::Var(v) = &t[*p] else { panic!("atom expected") };
            *p += 1;
            Expr::var(v)
        };
        climb(toks, &mut pos, 1, arith_prec, &mut atom)
    }

    pub fn text(toks: &[Tok]) -> String {
        toks.iter()
            .map(|t| match t {
                Tok::Var(v) => v.clone(),
                Tok::Op(o) => o.to_string(),
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

use reference::Tok;

fn chain(ops: &'static [&'static str], with_not: bool) -> impl Strategy<Value = Vec<Tok>> {
    let var = prop::sample::select(vec!["a", "b", "c", "d", "e"]);
    (
        var.clone(),
        prop::collection::vec((prop::sample::select(ops.to_vec()), var, 0usize..3), 0..8),
        0usize..2,
    )
        .prop_map(move |(first, rest, lead)| {
            let mut t = Vec::new();
            let nots = |n: usize, t: &mut Vec<Tok>| {
                if with_not {
                    t.extend((0..n).map(|_| Tok::Op("not")));
                }
            };
            nots(lead, &mut t);
            t.push(Tok::Var(first.to_string()));
            for (op, v, n) in rest {
                t.push(Tok::Op(op));
                nots(if n == 2 { 1 } else { 0 }, &mut t);
                t.push(Tok::Var(v.to_string()));
            }
            t
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn boolean_precedence_matches_reference(toks in chain(&["=>", "|", "&", "="], true)) {
        let text = reference::text(&toks);
        prop_assert_eq!(parse_event(&text).unwrap(), reference::parse_bool(&toks), "{}", text);
    }

    #[test]
    fn arithmetic_precedence_matches_reference(toks in chain(&["+", "-", "*", "/"], false)) {
        let text = format!("{} < z", reference::text(&toks));
        let want = Expr::binary(BinOp::Lt, reference::parse_arith(&toks), Expr::var("z"));
        prop_assert_eq!(parse_event(&text).unwrap(), want, "{}", text);
    }

    #[test]
    fn render_then_parse_is_identity(seed in any::<u64>()) {
        let req = Generator::new(seed).requirement("r");
        for on in [true, false] {
            let text = render_textual(&req, on);
            let back = parse_requirement(&text);
            prop_assert!(back.is_ok(), "{}: {:?}", text, back);
            prop_assert!(back.unwrap().same_formula(&req), "{}", text);
        }
    }

    #[test]
    fn events_round_trip(seed in any::<u64>(), depth in 1u32..7) {
        let e = Generator::new(seed).bool_expr(depth);
        for on in [true, false] {
            let text = render_event(&e, on);
            prop_assert_eq!(parse_event(&text).unwrap(), e.clone(), "{}", text);
        }
    }

    #[test]
    fn arbitrary_input_never_panics(s in "\\PC{0,80}") {
        match parse_event(&s) {
            Ok(_) => {}
            Err(d) => prop_assert!(!d.is_empty()),
        }
        if let Err(d) = parse_requirement(&s) {
            prop_assert!(!d.is_empty());
        }
    }

    #[test]
    fn token_soup_never_panics(words in prop::collection::vec(prop::sample::select(vec![
        "(", ")", "a", "b", "3", "2.5", "and", "or", "not", "=>", "=", "<", "+", "-", "*", "/", ",",
        "last", "abs", "min", "max", "extractBit", "bit", "of", "the value of", "steps ago",
        "the absolute value of", "the minimum of", "is equal to", "TRUE",
    ]), 0..25)) {
        let s = words.join(" ");
        if let Err(d) = parse_event(&s) {
            prop_assert!(!d.is_empty());
            prop_assert!(d[0].line >= 1 && d[0].col >= 1);
        }
    }
}
