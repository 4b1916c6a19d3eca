"""Walk one certificate: hierarchy, the cut-open level, its strand and descent."""
from sinkfree.certify import certify
from sinkfree.verify import verify_certificate

cert = certify("23,11,1,7")
print(cert.summary_text())
for lv in cert.data["levels"]:
    m = lv["model"]
    print(f"level {lv['level']} replaces {lv['replaced_role']}: {len(m['chords'])} chords, "
          f"status {lv['status']}")
    if lv["collapse"]:
        s = lv["collapse"]["strand"]
        print(f"  strand {s['p']}/{s['q']} ending at {s['endpoints']}, "
              f"sink disks {lv['collapse']['sink_disks_before']} -> {lv['collapse']['sink_disks_after']}")
        print("  descent", " -> ".join(lv["descent"]["chain"]))
    for e in lv["safety"]:
        print(f"  {e['ref']}: {e['reason']}")
print("terminal push safety:", sorted({e["reason"] for e in cert.data["terminal"]["safety"]}))
print("independent replay:", "ok" if verify_certificate(cert.to_json()) else "rejected")
