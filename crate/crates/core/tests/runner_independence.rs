//! Suite reports do not depend on how replications are scheduled.

use std::sync::Mutex;

use semimarkov::exec::{Runner, Serial};
use semimarkov::limits::limit_parameters;
use semimarkov::reference;
use semimarkov::verify::{
    clt_suite, gamma2_suite, renewal_suite, residual_suite, wald_suite, CltOptions, Gamma2Options,
    RenewalOptions, ResidualOptions, WaldOptions,
};

/// Interleaves indices over scoped threads, finishing in arbitrary order.
struct Threads(usize);

impl Runner for Threads {
    fn map<T, F>(&self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        let slots: Mutex<Vec<Option<T>>> = Mutex::new((0..count).map(|_| None).collect());
        std::thread::scope(|scope| {
            for w in 0..self.0 {
                let (f, slots) = (&f, &slots);
                scope.spawn(move || {
                    for i in (w..count).step_by(self.0) {
                        let value = f(i);
                        slots.lock().unwrap()[i] = Some(value);
                    }
                });
            }
        });
        slots.into_inner().unwrap().into_iter().map(Option::unwrap).collect()
    }
}

#[test]
fn reports_are_identical_across_runners() {
    let kernel = reference::three_state();
    let params = limit_parameters(&kernel).unwrap();
    let clt = CltOptions {
        n_reps: 2000,
        lambda: 100.0,
        ..CltOptions::default()
    };
    assert_eq!(
        clt_suite(&kernel, &params, &clt, &Serial).unwrap(),
        clt_suite(&kernel, &params, &clt, &Threads(3)).unwrap()
    );

    let renewal = RenewalOptions {
        n_reps: 20,
        ..RenewalOptions::default()
    };
    assert_eq!(
        renewal_suite(&kernel, &renewal, &Serial).unwrap(),
        renewal_suite(&kernel, &renewal, &Threads(4)).unwrap()
    );

    let residual = ResidualOptions {
        n_reps: 20,
        ..ResidualOptions::default()
    };
    assert_eq!(
        residual_suite(&kernel, &residual, &Serial).unwrap(),
        residual_suite(&kernel, &residual, &Threads(2)).unwrap()
    );

    let wald = WaldOptions {
        n_cycles: 5000,
        ..WaldOptions::default()
    };
    assert_eq!(
        wald_suite(&kernel, &wald, &Serial).unwrap(),
        wald_suite(&kernel, &wald, &Threads(5)).unwrap()
    );

    let gamma2 = Gamma2Options {
        n_cycles: 5000,
        ..Gamma2Options::default()
    };
    assert_eq!(
        gamma2_suite(&kernel, &gamma2, &Serial).unwrap(),
        gamma2_suite(&kernel, &gamma2, &Threads(3)).unwrap()
    );
}
