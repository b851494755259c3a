#![no_main]
use libfuzzer_sys::fuzz_target;
use qent_core::entropy::EntropicOrder;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(order) = text.parse::<EntropicOrder>() {
        // accepted orders must survive a display/parse round trip
        let relabeled: EntropicOrder = order.to_string().parse().unwrap();
        assert_eq!(relabeled, order);
        if let EntropicOrder::Finite(q) = order {
            assert!(q > 0.0 && q.is_finite());
        }
    }
});
