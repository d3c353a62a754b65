mod strategies;

use absa_forge::eval::{prf, Fraction};
use absa_forge::{
    parse_prediction, render_target, score, CategoryVocab, Example, ParseOutcome, ScoreOptions,
    SentimentLexicon, Task, SSEP_JOINER,
};
use proptest::prelude::*;
use strategies::{categories, example_with};

/// Gold examples plus predictions built from a random subset of each gold
/// example's quads and some foreign quads.
fn case() -> impl Strategy<Value = (Task, Vec<Example>, Vec<Example>)> {
    (prop::sample::select(Task::ALL.to_vec()), categories()).prop_flat_map(|(task, cats)| {
        let pair = (example_with(cats.clone(), 4), example_with(cats, 3), any::<u8>());
        prop::collection::vec(pair, 1..6).prop_map(move |pairs| {
            let mut gold = Vec::new();
            let mut pred = Vec::new();
            for (i, (g, foreign, mask)) in pairs.into_iter().enumerate() {
                let id = format!("test:{i}");
                let mut quads: Vec<_> = g
                    .quads
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| mask & (1 << j) != 0)
                    .map(|(_, q)| q.clone())
                    .collect();
                if mask & 0x80 != 0 {
                    quads.extend(foreign.quads);
                }
                pred.push(Example { id: id.clone(), text: g.text.clone(), quads });
                gold.push(Example { id, ..g });
            }
            (task, gold, pred)
        })
    })
}

fn parse_all(preds: &[Example], gold: &[Example], task: Task, dup: bool) -> Vec<ParseOutcome> {
    let lex = SentimentLexicon::default();
    let vocab = CategoryVocab::new(gold.iter().flat_map(|e| e.quads.iter().filter_map(|q| q.category.as_ref())));
    preds
        .iter()
        .map(|p| {
            let mut text = render_target(p, task, &lex).unwrap();
            if dup && !text.is_empty() {
                text = format!("{text}{SSEP_JOINER}{text}");
            }
            parse_prediction(&text, task, &vocab, &lex)
        })
        .collect()
}

fn within_unit(f: &Fraction) -> bool {
    *f.0.numer() <= *f.0.denom()
}

proptest! {
    #[test]
    fn duplicate_predictions_do_not_change_scores((task, gold, pred) in case()) {
        let once = parse_all(&pred, &gold, task, false);
        let twice = parse_all(&pred, &gold, task, true);
        let a = score(gold.iter().zip(&once), task, ScoreOptions::default()).unwrap();
        let b = score(gold.iter().zip(&twice), task, ScoreOptions::default()).unwrap();
        prop_assert_eq!((a.tp, a.pred_count, a.gold_count), (b.tp, b.pred_count, b.gold_count));
    }

    #[test]
    fn example_order_is_irrelevant((task, gold, pred) in case()) {
        let outs = parse_all(&pred, &gold, task, false);
        let fwd = score(gold.iter().zip(&outs), task, ScoreOptions::default()).unwrap();
        let rev = score(gold.iter().zip(&outs).rev(), task, ScoreOptions::default()).unwrap();
        prop_assert_eq!(fwd.f1, rev.f1);
        prop_assert_eq!(fwd.tp, rev.tp);
    }

    #[test]
    fn scores_are_bounded_and_f1_is_harmonic((task, gold, pred) in case()) {
        let outs = parse_all(&pred, &gold, task, false);
        let r = score(gold.iter().zip(&outs), task, ScoreOptions::default()).unwrap();
        prop_assert!(r.tp <= r.pred_count.min(r.gold_count));
        prop_assert!(within_unit(&r.precision) && within_unit(&r.recall) && within_unit(&r.f1));
        let (lo, hi) = if r.precision.0 < r.recall.0 { (r.precision.0, r.recall.0) } else { (r.recall.0, r.precision.0) };
        if r.tp > 0 {
            prop_assert!(lo <= r.f1.0 && r.f1.0 <= hi);
        }
        prop_assert_eq!(prf(r.tp, r.pred_count, r.gold_count).2, r.f1);
    }

    #[test]
    fn perfect_predictions_score_one((task, gold, _pred) in case()) {
        let outs = parse_all(&gold, &gold, task, false);
        let r = score(gold.iter().zip(&outs), task, ScoreOptions::default()).unwrap();
        prop_assert_eq!(r.f1, Fraction::of(1, 1));
    }

    #[test]
    fn adding_a_correct_tuple_never_lowers_recall((task, gold, pred) in case()) {
        let outs = parse_all(&pred, &gold, task, false);
        let before = score(gold.iter().zip(&outs), task, ScoreOptions::default()).unwrap();
        let mut more = pred.clone();
        more[0].quads.push(gold[0].quads[0].clone());
        let outs = parse_all(&more, &gold, task, false);
        let after = score(gold.iter().zip(&outs), task, ScoreOptions::default()).unwrap();
        prop_assert!(after.tp >= before.tp);
        prop_assert!(after.recall.0 >= before.recall.0);
    }
}
