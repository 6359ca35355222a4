use pyo3::prelude::*;
use qpn::qpn as qpn_module;

const SCRIPT: &std::ffi::CStr = c"
import qpn
net = qpn.Network('node z prob\\nnode w det\\nnode x prob\\nnode y prob\\nedge z w +\\nedge w x +\\nedge w y +\\n')
assert net.influence('z', 'y') == '+'
assert ('z', 'y', '+') in net.transform('dnp:w').edges()
assert net.separated('x', 'y', ['w'])
try:
    qpn.Network('edge a b +\\n')
    raise AssertionError('accepted a dangling edge')
except qpn.QpnError:
    pass
";

#[test]
fn module_works_in_an_embedded_interpreter() {
    pyo3::append_to_inittab!(qpn_module);
    Python::initialize();
    Python::attach(|py| py.run(SCRIPT, None, None)).unwrap();
}
