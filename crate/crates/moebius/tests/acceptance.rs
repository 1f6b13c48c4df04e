use moebius::acceptance::{report_line, run_one, CRITERIA};

fn main() {
    let mut failed = 0;
    for c in &CRITERIA {
        let r = run_one(c);
        println!("{}", report_line(&r));
        if !r.passed {
            failed += 1;
        }
    }
    println!("{} of {} criteria passed", CRITERIA.len() - failed, CRITERIA.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
