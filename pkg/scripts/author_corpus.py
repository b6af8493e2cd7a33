"""Regenerate the shipped corpus under src/pcbverify/data.

Everything is written in canonical form, so rerunning on an unchanged script
is a no-op. Each bundle is checked with the corpus integrity gate before the
script exits; a nonzero status means some golden or mutation drifted.

    python3 scripts/author_corpus.py [--out DIR]
"""

from __future__ import annotations

import argparse
import shutil
import sys
from dataclasses import dataclass, field
from pathlib import Path

from pcbverify import _jsonfmt
from pcbverify.circuit import Circuit, make_component, serialize_circuit
from pcbverify.data import apply_edits, load_bundle, check_bundle
from pcbverify.harness import difficulty_of
from pcbverify.kg import kg_from_doc, lint_kg, mean_footprint, serialize_kg
from pcbverify.topology import serialize_template, template_from_doc

DEFAULT_OUT = Path(__file__).resolve().parents[1] / "src" / "pcbverify" / "data"

# -- knowledge graph -------------------------------------------------------------


def pin(number, name, role, function=None):
    return (number, name, role, function)


def part(pins, constraints=(), groups=None, **attrs):
    doc = {
        "pins": [{"number": n, "name": nm, "role": r} for n, nm, r, _ in pins],
        "constraints": [{"kind": k, "pins": list(ps)} for k, *ps in constraints],
        "attributes": dict(attrs),
    }
    for n, nm, _, fn in pins:
        if fn:
            doc["attributes"][f"pin.{nm}"] = fn
    if groups:
        doc["isolation_groups"] = groups
    return doc


SP, MBC, DRV, DIFF = ("supply_pair", "must_be_connected", "driving_pair",
                      "differential_pair_must_be_distinct")


def _two_terminal(kind, desc, pkg, n1="1", n2="2", r1="passive_terminal", r2="passive_terminal",
                  **extra):
    return part([pin(1, n1, r1, "terminal 1"), pin(2, n2, r2, "terminal 2")],
                passive_kind=kind, description=desc, package=pkg, **extra)


def _mosfet(pins, desc, pkg, kelvin):
    names = {nm for _, nm, _, _ in pins}
    mbc = ["D", "S"] + (["KS"] if "KS" in names else [])
    return part(pins, [(DRV, "G"), (MBC, *mbc)],
                description=desc, package=pkg, technology="SiC MOSFET" if "65R" in desc else "Si MOSFET",
                kelvin_source="yes" if kelvin else "no",
                usage="Gate resistor from the driver output to G; return the gate loop to "
                      + ("KS, not S." if kelvin else "S."),
                **_fet_ratings(desc))


def _fet_ratings(desc):
    if "BSC052" in desc:
        return {"v_ds_max": "80 V", "r_ds_on": "5.2 mOhm", "i_d": "100 A", "v_gs_range": "-20 V to 20 V"}
    if "033" in desc:
        return {"v_ds_max": "650 V", "r_ds_on": "33 mOhm", "i_d": "60 A", "v_gs_range": "-7 V to 23 V",
                "v_gs_recommended": "18 V on, 0 V off"}
    return {"v_ds_max": "650 V", "r_ds_on": "15 mOhm", "i_d": "120 A", "v_gs_range": "-7 V to 23 V",
            "v_gs_recommended": "18 V on, 0 V off"}


def build_kg_doc() -> dict:
    p = {}
    p["R"] = _two_terminal("resistor", "Resistor, generic value", "0603",
                           usage="Series element for dividers, gate drive and pull-ups.")
    p["C"] = _two_terminal("capacitor", "Ceramic capacitor, generic value", "0603",
                           usage="Decoupling across a supply pair or filtering a signal to ground.")
    p["C_film"] = _two_terminal("capacitor", "Film capacitor for DC link and output filtering", "radial",
                                voltage_rating="450 V",
                                usage="Bulk or high-frequency bus capacitance on power rails.")
    p["L"] = _two_terminal("inductor", "Inductor, generic value", "1210", n1="A", n2="B",
                           usage="Series filtering or resonant element.")
    p["Inductor_power"] = _two_terminal("inductor", "Power inductor for converter output stages", "SMD 22x22",
                                        current_rating="30 A",
                                        usage="Placed between a switch node and the output rail.")
    p["D"] = _two_terminal("diode", "Rectifier or signal diode", "SOD-123", n1="A", n2="K",
                           r1="diode_anode", r2="diode_cathode",
                           usage="Conducts from A to K; used for bootstrap charging and turn-off paths.")

    p["TLV1117-33"] = part(
        [pin(1, "GND", "supply_gnd", "ground reference"),
         pin(2, "OUTPUT", "out", "regulated 3.3 V output"),
         pin(3, "INPUT", "supply_vdd", "unregulated input")],
        [(SP, "INPUT", "GND"), (SP, "OUTPUT", "GND"), (MBC, "INPUT", "GND", "OUTPUT")],
        description="Fixed 3.3 V low-dropout linear regulator", package="SOT-223",
        v_in_max="15 V", i_out_max="800 mA", dropout="1.1 V at 800 mA",
        usage="Input capacitor INPUT to GND and output capacitor OUTPUT to GND are required for stability.")

    p["TPS54302"] = part(
        [pin(1, "GND", "buck_gnd", "ground"),
         pin(2, "SW", "buck_sw", "switch node to the output inductor"),
         pin(3, "VIN", "buck_vin", "input supply"),
         pin(4, "FB", "buck_fb", "feedback from the output divider, 0.596 V reference"),
         pin(5, "EN", "buck_en", "enable; tie to VIN or a divider"),
         pin(6, "BOOT", "buck_boot", "bootstrap capacitor to SW")],
        [(SP, "VIN", "GND"), (MBC, "VIN", "GND", "SW", "FB", "BOOT")],
        description="4.5 V to 28 V input, 3 A synchronous step-down converter", package="SOT-23-6",
        f_sw="400 kHz", v_ref="0.596 V",
        usage="Bootstrap capacitor BOOT to SW, inductor SW to output, divider from output to FB.")

    p["OPA328"] = part(
        [pin(1, "OUT", "out", "amplifier output"),
         pin(2, "V-", "supply_gnd", "negative supply"),
         pin(3, "+IN", "sense_plus", "noninverting input"),
         pin(4, "-IN", "sense_minus", "inverting input"),
         pin(5, "V+", "supply_vdd", "positive supply")],
        [(SP, "V+", "V-"), (DIFF, "+IN", "-IN"), (MBC, "+IN", "-IN", "OUT")],
        description="Precision zero-crossover rail-to-rail CMOS op amp", package="SOT-23-5",
        supply_range="2.2 V to 5.5 V", gbw="40 MHz",
        usage="Difference amplifier: input and feedback resistors on -IN, reference divider on +IN.")

    p["AMC1350"] = part(
        [pin(1, "VDD1", "primary_vdd", "high-side supply"),
         pin(2, "INP", "sense_plus", "noninverting analog input"),
         pin(3, "INN", "sense_minus", "inverting analog input"),
         pin(4, "GND1", "primary_gnd", "high-side ground"),
         pin(5, "GND2", "secondary_gnd", "low-side ground"),
         pin(6, "OUTN", "out_minus", "inverting output"),
         pin(7, "OUTP", "out_plus", "noninverting output"),
         pin(8, "VDD2", "secondary_vdd", "low-side supply")],
        [(SP, "VDD1", "GND1"), (SP, "VDD2", "GND2"), (DIFF, "INP", "INN"),
         (MBC, "VDD1", "INP", "INN", "GND1", "GND2", "OUTN", "OUTP", "VDD2")],
        groups={"primary": [1, 2, 3, 4], "secondary": [5, 6, 7, 8]},
        description="Reinforced isolated amplifier, +/-5 V input, fixed gain 0.4", package="SOIC-8",
        isolation="5000 Vrms", input_range="+/-5 V",
        usage="Divide the bus voltage into INP referenced to INN on GND1; outputs are differential.")

    p["ACS37010"] = part(
        [pin(1, "IP+", "sense_plus", "primary current path in"),
         pin(2, "IP-", "sense_minus", "primary current path out"),
         pin(3, "GND", "supply_gnd", "signal ground"),
         pin(4, "VOUT", "out", "analog output proportional to current"),
         pin(5, "VREF", "out", "zero-current reference output"),
         pin(6, "VCC", "supply_vdd", "signal supply")],
        [(SP, "VCC", "GND"), (DIFF, "IP+", "IP-"), (MBC, "IP+", "IP-", "VCC", "GND", "VOUT")],
        groups={"primary": [1, 2], "secondary": [3, 4, 5, 6]},
        description="Hall-effect current sensor with integrated isolated conductor", package="SOIC-16W",
        range="+/-50 A", supply="3.3 V", isolation="4800 Vrms",
        usage="Route line current through IP+ to IP-; decouple VCC to GND.")

    p["UCC27211"] = part(
        [pin(1, "VDD", "supply_vdd", "driver supply"),
         pin(2, "HB", "halfbridge_hb", "high-side bootstrap supply"),
         pin(3, "HO", "gate_ho", "high-side gate output"),
         pin(4, "HS", "halfbridge_hs", "high-side source return"),
         pin(5, "HI", "logic_in", "high-side logic input"),
         pin(6, "LI", "logic_in", "low-side logic input"),
         pin(7, "VSS", "supply_gnd", "ground"),
         pin(8, "LO", "gate_lo", "low-side gate output")],
        [(SP, "VDD", "VSS"), (SP, "HB", "HS"),
         (MBC, "VDD", "HB", "HO", "HS", "HI", "LI", "VSS", "LO")],
        description="120 V boot, 4 A peak half-bridge driver", package="SOIC-8",
        supply_range="8 V to 17 V", hb_max="120 V",
        usage="Bootstrap diode from VDD to HB and bootstrap capacitor HB to HS.")

    p["UCC27511"] = part(
        [pin(1, "VDD", "supply_vdd", "supply"),
         pin(2, "OUTH", "gate_lo", "source output, turn-on path"),
         pin(3, "OUTL", "gate_lo", "sink output, turn-off path"),
         pin(4, "IN+", "logic_in", "noninverting input"),
         pin(5, "IN-", "logic_in", "inverting input"),
         pin(6, "GND", "supply_gnd", "ground")],
        [(SP, "VDD", "GND"), (MBC, "VDD", "GND", "OUTH", "OUTL", "IN+", "IN-")],
        description="4 A / 8 A single-channel low-side gate driver with split outputs", package="SOT-23-6",
        supply_range="4.5 V to 18 V",
        usage="Separate turn-on and turn-off resistors from OUTH and OUTL to the gate.")

    p["UCC21710"] = part(
        [pin(1, "AIN", "sense_plus", "isolated analog sensing input"),
         pin(2, "OC", "sense_plus", "overcurrent detection input"),
         pin(3, "COM", "secondary_gnd", "secondary common, tie to the source"),
         pin(4, "OUTH", "gate_ho", "gate source output"),
         pin(5, "VDD", "secondary_vdd", "secondary positive supply"),
         pin(6, "OUTL", "gate_lo", "gate sink output"),
         pin(7, "CLMPI", "gate_lo", "active Miller clamp"),
         pin(8, "VEE", "secondary_gnd", "secondary negative supply"),
         pin(9, "GND", "primary_gnd", "primary ground"),
         pin(10, "IN+", "logic_in", "noninverting PWM input"),
         pin(11, "IN-", "logic_in", "inverting PWM input"),
         pin(12, "RDY", "logic_out", "power-good output"),
         pin(13, "FLT", "logic_out", "open-drain fault output"),
         pin(14, "RST/EN", "logic_in", "reset and enable"),
         pin(15, "VCC", "primary_vdd", "primary supply"),
         pin(16, "APWM", "logic_out", "isolated analog-to-PWM output")],
        [(SP, "VCC", "GND"), (SP, "VDD", "COM"), (SP, "VDD", "VEE"),
         (MBC, "VCC", "GND", "VDD", "COM", "VEE", "IN+", "IN-", "OUTH", "OUTL", "OC", "CLMPI",
          "FLT", "RST/EN")],
        groups={"primary": [9, 10, 11, 12, 13, 14, 15, 16], "secondary": [1, 2, 3, 4, 5, 6, 7, 8]},
        description="Isolated single-channel gate driver with overcurrent protection and Miller clamp",
        package="SOIC-16DW", isolation="5700 Vrms", peak_current="10 A",
        usage="Bipolar supply VDD/COM/VEE on the secondary; FLT needs a pull-up on the primary.")

    p["UCC5390E"] = part(
        [pin(1, "VCC1", "primary_vdd", "input-side supply"),
         pin(2, "IN+", "logic_in", "noninverting input"),
         pin(3, "IN-", "logic_in", "inverting input"),
         pin(4, "GND1", "primary_gnd", "input-side ground"),
         pin(5, "VCC2", "secondary_vdd", "output-side positive supply"),
         pin(6, "OUT", "gate_ho", "gate drive output"),
         pin(7, "GND2", "secondary_gnd", "output-side common"),
         pin(8, "VEE2", "secondary_gnd", "output-side negative supply")],
        [(SP, "VCC1", "GND1"), (SP, "VCC2", "GND2"), (SP, "VCC2", "VEE2"),
         (MBC, "VCC1", "IN+", "IN-", "GND1", "VCC2", "OUT", "GND2", "VEE2")],
        groups={"primary": [1, 2, 3, 4], "secondary": [5, 6, 7, 8]},
        description="Isolated single-channel gate driver, bipolar output supply", package="SOIC-8",
        isolation="5000 Vrms", peak_current="10 A",
        usage="GND2 to the MOSFET source or Kelvin source; VEE2 is the negative rail.")

    p["MGJ2D121505SC"] = part(
        [pin(1, "+VIN", "primary_vdd", "12 V input"),
         pin(2, "-VIN", "primary_gnd", "input return"),
         pin(5, "-VOUT", "secondary_gnd", "-9 V output"),
         pin(6, "0V", "secondary_gnd", "output common"),
         pin(7, "+VOUT", "secondary_vdd", "+15 V output")],
        [(SP, "+VIN", "-VIN"), (SP, "+VOUT", "0V"), (SP, "0V", "-VOUT"),
         (MBC, "+VIN", "-VIN", "+VOUT", "0V")],
        groups={"primary": [1, 2], "secondary": [5, 6, 7]},
        description="2 W isolated DC-DC module, 12 V in, +15 V / -9 V out", package="SIP-7",
        isolation="5200 VDC", power="2 W",
        usage="Decouple +VIN to -VIN and +VOUT to 0V; never join primary and secondary pins.")

    p["IMZA65R015M2H"] = _mosfet(
        [pin(1, "D", "mosfet_drain", "drain"), pin(2, "S", "mosfet_source", "power source"),
         pin(3, "KS", "mosfet_kelvin_source", "Kelvin source for the gate loop"),
         pin(4, "G", "mosfet_gate", "gate")],
        "CoolSiC 650 V 15 mOhm IMZA65R015M2H", "TO-247-4", kelvin=True)
    p["IMW65R015M2H"] = _mosfet(
        [pin(1, "G", "mosfet_gate", "gate"), pin(2, "D", "mosfet_drain", "drain"),
         pin(3, "S", "mosfet_source", "source")],
        "CoolSiC 650 V 15 mOhm IMW65R015M2H", "TO-247-3", kelvin=False)
    p["IMT65R033M2H"] = _mosfet(
        [pin(1, "G", "mosfet_gate", "gate"), pin(2, "KS", "mosfet_kelvin_source", "Kelvin source"),
         pin(3, "S", "mosfet_source", "power source"), pin(4, "D", "mosfet_drain", "drain")],
        "CoolSiC 650 V 33 mOhm IMT65R033M2H", "TOLL", kelvin=True)
    p["IMLT65R015M2H"] = _mosfet(
        [pin(1, "G", "mosfet_gate", "gate"), pin(2, "KS", "mosfet_kelvin_source", "Kelvin source"),
         pin(3, "S", "mosfet_source", "power source"), pin(4, "D", "mosfet_drain", "drain")],
        "CoolSiC 650 V 15 mOhm IMLT65R015M2H", "TOLT", kelvin=True)
    p["BSC052N08NS5"] = _mosfet(
        [pin(1, "S", "mosfet_source", "source"), pin(4, "G", "mosfet_gate", "gate"),
         pin(5, "D", "mosfet_drain", "drain")],
        "OptiMOS 80 V 5.2 mOhm BSC052N08NS5", "SuperSO8", kelvin=False)

    p["transformer_PQ5050"] = part(
        [pin(1, "Pri_1", "xfmr_primary", "primary start"), pin(2, "Pri_2", "xfmr_primary", "primary end"),
         pin(3, "Sec_1", "xfmr_secondary", "secondary start"), pin(4, "Sec_2", "xfmr_secondary", "secondary end")],
        [(MBC, "Pri_1", "Pri_2", "Sec_1", "Sec_2"), (DIFF, "Pri_1", "Pri_2"), (DIFF, "Sec_1", "Sec_2")],
        groups={"primary": [1, 2], "secondary": [3, 4]},
        description="PQ50/50 power transformer for isolated bridge converters", package="PQ5050",
        turns_ratio="1:1", isolation="4000 Vrms",
        usage="Primary across the primary bridge (with a blocking capacitor), secondary to the rectifier.")
    for pt, attrs in DESIGN_NOTES.items():
        p[pt]["attributes"].update(attrs)
    return {"parts": p}



# Datasheet design data merged into the entries above. Kept separate so the
# pin tables stay readable.
_PASSIVE_NOTES = {
    "value_notation": "engineering suffix, e.g. 4.7k, 100n, 10u",
    "orientation": "non-polar; pin order carries no meaning",
}
DESIGN_NOTES = {
    "R": {**_PASSIVE_NOTES, "tolerance": "1 %", "power_rating": "0.1 W",
          "typical_values": "gate 2.2 to 10 Ohm, pulldown 10k, divider 10k to 1M",
          "high_voltage": "split dividers above 200 V into series resistors to respect element voltage"},
    "C": {**_PASSIVE_NOTES, "dielectric": "X7R", "voltage_rating": "50 V",
          "typical_values": "decoupling 100n to 10u, bootstrap 100n to 1u, filter 1n to 100p",
          "placement": "as close as possible to the supply pin pair it decouples"},
    "C_film": {**_PASSIVE_NOTES, "dielectric": "polypropylene",
               "typical_values": "DC link 20u to 100u, AC filter 1u to 10u",
               "ripple_current": "rated for converter switching ripple"},
    "L": {**_PASSIVE_NOTES, "current_rating": "3 A", "typical_values": "1u to 47u",
          "saturation": "choose saturation current above peak ripple current"},
    "Inductor_power": {**_PASSIVE_NOTES, "typical_values": "20u to 1m",
                       "saturation": "saturation current above the peak converter current",
                       "core": "powder core, low loss at the switching frequency"},
    "D": {"value_notation": "part number, e.g. BAT54, MURS120", "orientation": "polar; A is anode, K is cathode",
          "typical_use": "bootstrap charging from VDD to HB; turn-off path in a split gate resistor network",
          "recovery": "ultrafast or Schottky for bootstrap duty"},
    "TLV1117-33": {"abs_max_input": "20 V", "thermal": "derate above 1 W dissipation",
                   "input_cap": "10u ceramic or tantalum", "output_cap": "10u, ESR below 1 Ohm",
                   "layout": "short return from both capacitors to GND pin"},
    "TPS54302": {"abs_max_input": "30 V", "output_range": "0.6 V to 24 V",
                 "divider": "R_top = R_bottom * (VOUT / 0.596 - 1); R_bottom 10k typical",
                 "inductor": "10u for 3.3 V out at 12 V in", "boot_cap": "100n X7R",
                 "input_cap": "10u plus 100n close to VIN", "output_cap": "2 x 22u ceramic",
                 "layout": "minimize the VIN, SW, GND loop; keep FB trace away from SW"},
    "OPA328": {"offset": "50 uV max", "input_range": "rail to rail",
               "gain_rule": "VOUT = (R2/R1) * (VINP - VINN) + VREF with matched ratios R4/R3 = R2/R1",
               "decoupling": "100n from V+ to V- at the package",
               "stability": "unity-gain stable; isolate capacitive loads above 1 nF with a series resistor"},
    "AMC1350": {"gain": "0.4 V/V", "output_common_mode": "1.44 V",
                "high_side_supply": "3.3 V or 5 V from an isolated or bootstrap source referenced to GND1",
                "low_side_supply": "3.3 V or 5 V referenced to GND2",
                "decoupling": "100n plus 1u on each side",
                "divider": "scale the bus voltage to at most 5 V at INP; INN tied to GND1",
                "creepage": "keep copper on each side clear of the barrier region"},
    "ACS37010": {"sensitivity": "26.4 mV/A at 3.3 V", "zero_current_output": "VCC/2 on VREF",
                 "primary_resistance": "0.9 mOhm", "bandwidth": "250 kHz",
                 "output_filter": "optional RC on VOUT; 1n to GND typical",
                 "isolation_rule": "IP+ and IP- carry line current and must never share a net with signal pins"},
    "UCC27211": {"peak_current": "4 A source, 4 A sink", "propagation_delay": "18 ns",
                 "bootstrap_diode": "internal diode present, external ultrafast diode recommended at high frequency",
                 "bootstrap_cap": "at least 10 x the high-side gate charge; 100n to 1u",
                 "vdd_cap": "1u ceramic, 10 x the bootstrap capacitance",
                 "gate_resistors": "2 to 10 Ohm in series with HO and LO",
                 "input_logic": "TTL compatible, independent of VDD"},
    "UCC27511": {"peak_current": "4 A source, 8 A sink", "propagation_delay": "13 ns",
                 "input_logic": "IN+ noninverting with IN- tied to GND, or inverting with IN+ to VDD",
                 "decoupling": "1u plus 100n from VDD to GND",
                 "gate_resistors": "turn-on resistor on OUTH larger than turn-off resistor on OUTL",
                 "gate_pulldown": "10k from gate to source holds the switch off at power-up"},
    "UCC21710": {"propagation_delay": "90 ns", "cmti": "200 V/ns",
                 "overcurrent": "OC threshold 0.7 V; RC filter from OC to COM sets blanking",
                 "miller_clamp": "CLMPI tied directly to the gate; clamps when gate falls below 2 V",
                 "fault": "FLT and RDY are open drain; pull up to VCC with 10k",
                 "supply": "VDD to COM +15 V to +20 V, COM to VEE up to -5 V or -9 V",
                 "decoupling": "1u plus 100n on VCC, on VDD to COM and on COM to VEE"},
    "UCC5390E": {"propagation_delay": "65 ns", "cmti": "100 V/ns",
                 "uvlo": "12 V referenced to VEE2 for SiC drive",
                 "supply": "VCC2 to GND2 +15 V to +18 V, GND2 to VEE2 -3 V to -9 V",
                 "decoupling": "1u plus 100n on VCC1 to GND1, VCC2 to GND2 and GND2 to VEE2",
                 "gate_network": "turn-on resistor from OUT to G; turn-off resistor with a diode back to OUT",
                 "input_logic": "IN+ noninverting, IN- tied to GND1 when unused"},
    "MGJ2D121505SC": {"input_range": "10.8 V to 13.2 V", "load_regulation": "5 %",
                      "capacitive_load": "up to 10u per output",
                      "decoupling": "4.7u on the input, 1u to 4.7u on each output",
                      "rails": "+15 V from +VOUT to 0V, -9 V from -VOUT to 0V; 0V ties to the switch source",
                      "cmti": "200 kV/us dv/dt immunity"},
    "IMZA65R015M2H": {"gate_charge": "63 nC", "c_iss": "2.4 nF",
                      "thermal": "R_thJC 0.27 K/W", "body_diode": "usable for dead-time conduction",
                      "pulldown": "10k from G to KS"},
    "IMW65R015M2H": {"gate_charge": "63 nC", "c_iss": "2.4 nF", "thermal": "R_thJC 0.27 K/W",
                     "pulldown": "10k from G to S", "body_diode": "usable for dead-time conduction"},
    "IMT65R033M2H": {"gate_charge": "30 nC", "c_iss": "1.1 nF", "thermal": "R_thJC 0.55 K/W",
                     "pulldown": "10k from G to KS", "mounting": "bottom-side cooled SMD"},
    "IMLT65R015M2H": {"gate_charge": "63 nC", "c_iss": "2.4 nF", "thermal": "R_thJC 0.3 K/W",
                      "pulldown": "10k from G to KS", "mounting": "top-side cooled SMD"},
    "BSC052N08NS5": {"gate_charge": "34 nC", "c_iss": "2.5 nF", "thermal": "R_thJC 1.0 K/W",
                     "pulldown": "10k from G to S", "drive_voltage": "10 V logic-level not supported"},
    "transformer_PQ5050": {"magnetizing_inductance": "1 mH", "leakage_inductance": "2 uH",
                           "power": "3 kW at 100 kHz",
                           "dot_convention": "Pri_1 and Sec_1 are the dotted ends",
                           "blocking_cap": "film capacitor in series with the primary prevents DC saturation"},
}


# -- circuit builder ---------------------------------------------------------------


@dataclass
class Board:
    """Accumulates components and pin-to-net bindings for one golden."""

    kg: dict
    comps: list = field(default_factory=list)
    bindings: dict = field(default_factory=dict)

    def add(self, ref, part_type, value=None, **nets):
        """``nets`` maps KG pin names to net names; pin names that are not
        identifiers are passed with a leading underscore, e.g. ``_IN_plus``."""
        entry = self.kg["parts"][part_type]
        pins = [(p["number"], p["name"]) for p in entry["pins"]]
        by_name = {p["name"]: p["number"] for p in entry["pins"]}
        self.comps.append(make_component(ref, part_type, pins, value))
        for key, net in nets.items():
            name = PIN_ALIASES.get(key, key)
            self.bindings[(ref, by_name[name])] = net
        return self

    def two(self, ref, part_type, a, b, value=None):
        entry = self.kg["parts"][part_type]
        n1, n2 = (p["name"] for p in entry["pins"])
        return self.add(ref, part_type, value, **{n1: a, n2: b}) if n1.isidentifier() \
            else self._bind2(ref, part_type, a, b, value)

    def _bind2(self, ref, part_type, a, b, value):
        entry = self.kg["parts"][part_type]
        pins = [(p["number"], p["name"]) for p in entry["pins"]]
        self.comps.append(make_component(ref, part_type, pins, value))
        self.bindings[(ref, pins[0][0])] = a
        self.bindings[(ref, pins[1][0])] = b
        return self

    def circuit(self, **metadata) -> Circuit:
        return Circuit(tuple(self.comps), (), metadata).with_bindings(self.bindings)


PIN_ALIASES = {
    "VIN_plus": "+VIN", "VIN_minus": "-VIN", "VOUT_plus": "+VOUT", "VOUT_minus": "-VOUT", "ZERO_V": "0V",
    "IN_plus": "+IN", "IN_minus": "-IN", "V_plus": "V+", "V_minus": "V-",
    "INp": "IN+", "INm": "IN-", "IP_plus": "IP+", "IP_minus": "IP-", "RST_EN": "RST/EN",
}


def iso_gate_drive(b: Board, n: int, fet_ref: str, gate: str, ret: str, pwm: str, suffix: str):
    """An isolated bipolar supply, isolated driver and split turn-on/turn-off
    resistors driving one MOSFET whose gate-loop return net is ``ret``.

    Uses refs U{n}, U{n+1}, R{n}, R{n+1}, D{n}, C{n}, C{n+1}.
    """
    vdd, vee, drv, roff = f"VDD_{suffix}", f"VEE_{suffix}", f"DRV_{suffix}", f"ROFF_{suffix}"
    b.add(f"U{n}", "MGJ2D121505SC", VIN_plus="VCC", VIN_minus="GND", VOUT_plus=vdd, ZERO_V=ret,
          VOUT_minus=vee)
    b.add(f"U{n + 1}", "UCC5390E", VCC1="VCC", INp=pwm, INm="GND", GND1="GND", VCC2=vdd, OUT=drv,
          GND2=ret, VEE2=vee)
    b.two(f"R{n}", "R", drv, gate, "4.7")
    b.two(f"R{n + 1}", "R", gate, roff, "1.0")
    b.add(f"D{n}", "D", "BAT54", A=roff, K=drv)
    b.two(f"C{n}", "C", vdd, ret, "1u")
    b.two(f"C{n + 1}", "C", ret, vee, "1u")


def sic_leg(b: Board, n: int, hi: str, sw: str, lo: str, tag: str, fet_base: int):
    """A SiC half-bridge leg of two Kelvin-source MOSFETs with full drive
    chains. Component numbering starts at ``n`` (drivers) and ``fet_base``."""
    qh, ql = f"Q{fet_base}", f"Q{fet_base + 1}"
    b.add(qh, "IMZA65R015M2H", D=hi, S=sw, KS=f"KS_{tag}H", G=f"G_{tag}H")
    b.add(ql, "IMZA65R015M2H", D=sw, S=lo, KS=f"KS_{tag}L", G=f"G_{tag}L")
    iso_gate_drive(b, n, qh, f"G_{tag}H", f"KS_{tag}H", f"PWM_{tag}H", f"{tag}H")
    iso_gate_drive(b, n + 2, ql, f"G_{tag}L", f"KS_{tag}L", f"PWM_{tag}L", f"{tag}L")


# -- templates ------------------------------------------------------------------


def rule(tau, a, b, min_count=1):
    d = {"tau": tau, "a": a, "b": b}
    if min_count != 1:
        d["min_count"] = min_count
    return d


def sk(vertices, edges):
    return {
        "vertices": [dict(zip(("id", "kind", "bind"), v)) for v in vertices],
        "edges": [{"a": a, "b": b, "type": t} for a, b, t in edges],
    }


POWER_PASSIVES = ["C", "C_film", "D", "Inductor_power", "L", "R"]


def template(name, ports, rules=(), skeleton=None, semantic=(), passives=None):
    doc = {"name": name, "ports": ports, "rules": list(rules),
           "skeleton": skeleton or {"vertices": [], "edges": []},
           "semantic_constraints": list(semantic)}
    if passives:
        doc["passive_set"] = passives
    return doc


def drive_rules(drv, fet, sup):
    """Rules every isolated drive chain satisfies."""
    return [
        rule("R_SERIES", f"{drv}.OUT", f"{fet}.G"),
        rule("CONNECTED", f"{drv}.GND2", f"{fet}.KS"),
        rule("C_DIRECT", f"{drv}.VCC2", f"{drv}.GND2"),
        rule("C_DIRECT", f"{drv}.GND2", f"{drv}.VEE2"),
    ]


# -- tasks --------------------------------------------------------------------------


@dataclass
class Task:
    id: int
    name: str
    type: str
    prompt: str
    io_nodes: str
    vi_level: str
    key_components: str
    template: dict
    golden: Circuit | None = None
    mutations: list = field(default_factory=list)
    parts: list = field(default_factory=list)
    known_unsatisfied: bool = False


def mutation(name, description, edits, code, phase):
    return {"name": name, "description": description, "edits": edits,
            "expected": {"code": code, "phase": phase}}


P1, P2, P3, P4 = ("Phase1_SyntaxERC", "Phase2_KGConstraint", "Phase3_Topology", "Phase4_SystemTopology")


def mv(ref, pin_no, net):
    return {"op": "move_pin", "ref": ref, "pin": pin_no, "net": net}


def fl(ref, pin_no):
    return {"op": "float_pin", "ref": ref, "pin": pin_no}


def rm(ref):
    return {"op": "remove_component", "ref": ref}


def prompt(*lines):
    return "\n".join(lines)


def task_1(kg):
    b = Board(kg)
    b.two("R1", "R", "VIN", "VSENSE", "180k").two("R2", "R", "VSENSE", "GND", "10k")
    b.two("C1", "C", "VSENSE", "GND", "100n")
    t = template("divider_sense",
                 {"VIN": "net:VIN", "VSENSE": "net:VSENSE", "GND": "net:GND"},
                 [rule("R_SERIES", "net:VIN", "net:VSENSE"), rule("R_SERIES", "net:VSENSE", "net:GND"),
                  rule("C_DIRECT", "net:VSENSE", "net:GND")],
                 sk([("VIN", "port", "VIN"), ("VSENSE", "port", "VSENSE"), ("GND", "port", "GND")],
                    [("VIN", "VSENSE", "resistor"), ("VSENSE", "GND", "resistor")]))
    muts = [
        mutation("remove_bottom_resistor", "drop R2 so the divider has no lower leg",
                 [rm("R2")], "R_SERIES", P3),
        mutation("float_filter_cap", "move one terminal of C1 onto a dangling net",
                 [mv("C1", 2, "NC1")], "single_endpoint_net", P1),
    ]
    return Task(1, "Resistor divider sense", "Analog Sensing",
                prompt("Task: single-ended voltage sense divider.", "Ports: VIN (60 V), VSENSE (3.3 V full scale), GND.",
                       "Parts: R, C."),
                "VIN -> VSENSE", "60V -> 3.3V", "Resistors", t, b.circuit(task="1"), muts)


def task_2(kg):
    b = Board(kg)
    b.two("R1", "R", "HV+", "HV_DIV1", "1M").two("R2", "R", "HV_DIV1", "INP", "1M")
    b.two("R3", "R", "INP", "HGND", "12k")
    b.add("U1", "AMC1350", VDD1="VDD_HV", INP="INP", INN="HGND", GND1="HGND", GND2="GND",
          OUTN="OUTN", OUTP="OUTP", VDD2="VDD_LV")
    b.two("C1", "C", "VDD_HV", "HGND", "100n").two("C2", "C", "VDD_LV", "GND", "100n")
    t = template("isolated_voltage_sense",
                 {"VIN": "net:HV+", "OUTP": "U1.OUTP", "OUTN": "U1.OUTN", "HGND": "net:HGND",
                  "GND": "net:GND"},
                 [rule("R_SERIES", "role:sense_plus", "role:sense_minus"),
                  rule("C_DIRECT", "role:primary_vdd", "role:primary_gnd"),
                  rule("C_DIRECT", "role:secondary_vdd", "role:secondary_gnd"),
                  rule("DISTINCT", "role:primary_gnd", "role:secondary_gnd")],
                 semantic=[{"kind": "nets_in_distinct_isolation", "a": "VIN", "b": "OUTP"},
                           {"kind": "port_reaches_port_via", "a": "VIN", "b": "HGND", "via": ["resistor"]}])
    muts = [mutation("short_inputs", "tie INP to the high-side ground", [mv("U1", 2, "HGND")],
                     "differential_pair_must_be_distinct", P2)]
    return Task(2, "Isolated voltage sense", "Analog Sensing",
                prompt("Task: isolated bus voltage sensing with a divider into an isolated amplifier.",
                       "Ports: VIN (400 V), OUTP, OUTN (differential), HGND, GND.", "Parts: AMC1350, R, C."),
                "VIN -> OUTP, OUTN", "400V -> 3.3V", "AMC1350 (Iso-Amp)", t, b.circuit(task="2"), muts)


def task_3(kg):
    b = Board(kg)
    b.two("R1", "R", "VINN", "FB_N", "10k").two("R2", "R", "FB_N", "VOUT", "7.5k")
    b.two("R3", "R", "VINP", "REF_P", "10k").two("R4", "R", "REF_P", "VREF", "7.5k")
    b.add("U1", "OPA328", OUT="VOUT", V_minus="GND", IN_plus="REF_P", IN_minus="FB_N", V_plus="+3V3")
    b.two("C1", "C", "+3V3", "GND", "100n")
    t = template("difference_amplifier",
                 {"VINP": "net:VINP", "VINN": "net:VINN", "VREF": "net:VREF", "VOUT": "U1.OUT",
                  "VCC": "net:+3V3", "GND": "net:GND"},
                 [rule("R_SERIES", "net:VINN", "U1.-IN"), rule("R_SERIES", "U1.-IN", "U1.OUT"),
                  rule("R_SERIES", "net:VINP", "U1.+IN"), rule("R_SERIES", "U1.+IN", "net:VREF"),
                  rule("C_DIRECT", "U1.V+", "U1.V-")])
    muts = [
        mutation("inputs_shorted", "tie +IN to the feedback node", [mv("U1", 3, "FB_N")],
                 "differential_pair_must_be_distinct", P2),
        mutation("missing_feedback", "drop the feedback resistor", [rm("R2")], "R_SERIES", P3),
        mutation("supply_short", "V- on the positive rail", [mv("U1", 2, "+3V3")], "supply_pair", P2),
    ]
    return Task(3, "Differential to single-ended amplifier", "Analog Sensing",
                prompt("Task: difference amplifier with VREF offset.", "VREF = 1.65 V, VINP - VINN = +/-2.0 V.",
                       "Ports: VINP, VINN, VREF, VOUT, VCC (3.3 V), GND.", "Parts: OPA328, R, C."),
                "VINP, VINN -> VOUT", "2V -> 3V", "OPA328 (Op-Amp)", t, b.circuit(task="3"), muts)


def task_4(kg):
    b = Board(kg)
    b.add("U1", "ACS37010", IP_plus="LINE_IN", IP_minus="LINE_OUT", GND="GND", VOUT="ISNS_ISO",
          VREF="VREF_OUT", VCC="+3V3")
    b.two("C1", "C", "+3V3", "GND", "100n").two("C2", "C", "ISNS_ISO", "GND", "1n")
    b.two("C3", "C", "VREF_OUT", "GND", "1n")
    t = template("hall_current_sense",
                 {"LINE_IN": "net:LINE_IN", "LINE_OUT": "net:LINE_OUT", "ISNS_ISO": "U1.VOUT",
                  "VCC": "net:+3V3", "GND": "net:GND"},
                 [rule("C_DIRECT", "U1.VCC", "U1.GND"), rule("C_DIRECT", "U1.VOUT", "U1.GND")],
                 semantic=[{"kind": "nets_in_distinct_isolation", "a": "LINE_IN", "b": "ISNS_ISO"}])
    muts = [mutation("primary_to_ground", "return the sensed current into signal ground",
                     [mv("U1", 2, "GND")], "isolation_bridge", P2)]
    return Task(4, "Hall-effect current sense", "Analog Sensing",
                prompt("Task: isolated current sensing with an integrated conductor.",
                       "Ports: LINE_IN, LINE_OUT (50 A), ISNS_ISO (3.3 V), VCC, GND.", "Parts: ACS37010, C."),
                "LINE_IN -> ISNS_ISO", "50A -> 3.3V", "ACS37010 (Hall Sensor)", t, b.circuit(task="4"), muts)


def task_5(kg):
    b = Board(kg)
    b.add("U1", "TLV1117-33", GND="GND", OUTPUT="VOUT", INPUT="VIN")
    b.two("C1", "C", "VIN", "GND", "10u").two("C2", "C", "VOUT", "GND", "10u")
    t = template("ldo_supply", {"VIN": "net:VIN", "VOUT": "net:VOUT", "GND": "net:GND"},
                 [rule("C_DIRECT", "U1.INPUT", "U1.GND"), rule("C_DIRECT", "U1.OUTPUT", "U1.GND")])
    muts = [
        mutation("no_output_cap", "drop the output capacitor", [rm("C2")], "C_DIRECT", P3),
        mutation("float_ground", "leave the regulator ground pin open", [fl("U1", 1)],
                 "floating_supply_pin", P1),
        mutation("output_to_ground", "output pin on the ground net", [mv("U1", 2, "GND")],
                 "supply_pair", P2),
    ]
    return Task(5, "LDO supply", "Auxiliary Power",
                prompt("Task: linear regulated 3.3 V rail.", "Ports: VIN (12 V), VOUT (3.3 V), GND.",
                       "Parts: TLV1117-33, C."),
                "VIN -> VOUT", "12V -> 3.3V", "TLV1117-33 (LDO)", t, b.circuit(task="5"), muts)


def task_6(kg):
    b = Board(kg)
    b.add("U1", "TPS54302", GND="GND", SW="SW", VIN="VIN", FB="FB", EN="VIN", BOOT="BOOT")
    b.two("C1", "C", "VIN", "GND", "10u").two("C2", "C", "BOOT", "SW", "100n")
    b.two("L1", "L", "SW", "VOUT", "10u").two("C3", "C", "VOUT", "GND", "22u")
    b.two("R1", "R", "VOUT", "FB", "45.3k").two("R2", "R", "FB", "GND", "10k")
    t = template("aux_buck", {"VIN": "net:VIN", "VOUT": "net:VOUT", "GND": "net:GND"},
                 [rule("C_DIRECT", "U1.VIN", "U1.GND"), rule("C_DIRECT", "U1.BOOT", "U1.SW"),
                  rule("L_SERIES", "U1.SW", "net:VOUT"), rule("C_DIRECT", "net:VOUT", "U1.GND"),
                  rule("R_SERIES", "net:VOUT", "U1.FB"), rule("R_SERIES", "U1.FB", "U1.GND")],
                 semantic=[{"kind": "primitive_count_at_least", "primitive": "lc_filter", "n": 1},
                           {"kind": "primitive_count_at_least", "primitive": "bootstrap_cell", "n": 1}])
    muts = [mutation("float_feedback", "leave FB unconnected", [fl("U1", 4)], "must_be_connected", P2)]
    return Task(6, "Auxiliary buck regulator", "Auxiliary Power",
                prompt("Task: low-voltage buck regulator.", "Ports: VIN (12 V), VOUT (3.3 V), GND.",
                       "Parts: TPS54302, L, C, R."),
                "VIN -> VOUT", "12V -> 3.3V", "TPS54302 (Buck)", t, b.circuit(task="6"), muts)


def task_7(kg):
    b = Board(kg)
    # -VOUT is left open: this design uses only the unipolar +15 V rail
    b.add("U1", "MGJ2D121505SC", VIN_plus="VIN", VIN_minus="GND", VOUT_plus="VISO+", ZERO_V="ISO_0V")
    b.two("C1", "C", "VIN", "GND", "4.7u").two("C2", "C", "VISO+", "ISO_0V", "4.7u")
    t = template("isolated_dcdc",
                 {"VIN": "net:VIN", "GND": "net:GND", "VISO": "net:VISO+", "ISO_0V": "net:ISO_0V"},
                 [rule("C_DIRECT", "role:secondary_vdd", "role:secondary_gnd"),
                  rule("C_DIRECT", "role:primary_vdd", "role:primary_gnd")],
                 semantic=[{"kind": "nets_in_distinct_isolation", "a": "VIN", "b": "VISO"}])
    muts = [
        mutation("no_output_decoupling", "drop the output decoupling capacitor", [rm("C2")], "C_DIRECT", P3),
        mutation("input_short", "-VIN on the input rail", [mv("U1", 2, "VIN")], "supply_pair", P2),
        mutation("cap_floating_terminal", "one terminal of C2 on a dangling net",
                 [mv("C2", 2, "NC1")], "single_endpoint_net", P1),
        mutation("barrier_bridged", "+VOUT tied to the input rail", [mv("U1", 7, "VIN")],
                 "isolation_bridge", P2),
    ]
    return Task(7, "Isolated DC-DC supply", "Auxiliary Power",
                prompt("Task: isolated gate-drive supply rail from a 12 V input.",
                       "Ports: VIN (12 V), GND, VISO+ (15 V), ISO_0V.", "Parts: MGJ2D121505SC, C."),
                "VIN -> VISO+, VISO-", "12V -> 15V, -9V", "MGJ2D121505 (Iso-DCDC)", t, b.circuit(task="7"), muts)


HB_PORTS = {"VBUS": "net:VBUS+", "VSW": "net:VSW", "PGND": "net:PGND",
            "GATE_H": "net:GATE_H", "GATE_L": "net:GATE_L"}
HB_SKELETON = sk([("VBUS", "port", "VBUS"), ("SW", "switch_node", None), ("PGND", "port", "PGND")],
                 [("VBUS", "SW", "switch"), ("SW", "PGND", "switch"), ("VBUS", "PGND", "capacitor")])


def power_stage(kg, task_id, part_type, name, pkg, kelvin):
    b = Board(kg)
    if kelvin:
        b.add("Q1", part_type, D="VBUS+", S="VSW", KS="KS_H", G="GATE_H")
        b.add("Q2", part_type, D="VSW", S="PGND", KS="KS_L", G="GATE_L")
        b.two("R1", "R", "GATE_H", "KS_H", "10k").two("R2", "R", "GATE_L", "KS_L", "10k")
    else:
        b.add("Q1", part_type, D="VBUS+", S="VSW", G="GATE_H")
        b.add("Q2", part_type, D="VSW", S="PGND", G="GATE_L")
        b.two("R1", "R", "GATE_H", "VSW", "10k").two("R2", "R", "GATE_L", "PGND", "10k")
    for i in range(1, 9):
        b.two(f"C{i}", "C", "VBUS+", "PGND", "10n")
    ports = dict(HB_PORTS)
    ret_h, ret_l = ("Q1.KS", "Q2.KS") if kelvin else ("Q1.S", "Q2.S")
    if kelvin:
        ports.update({"KS_H": "net:KS_H", "KS_L": "net:KS_L"})
    t = template(f"half_bridge_{pkg.lower().replace('-', '')}", ports,
                 [rule("C_DIRECT", "Q1.D", "Q2.S", 8),
                  rule("R_SERIES", "Q1.G", ret_h), rule("R_SERIES", "Q2.G", ret_l)],
                 HB_SKELETON)
    muts = [mutation("seven_caps", "drop one of the eight decoupling capacitors", [rm("C8")], "C_DIRECT", P3)]
    if kelvin:
        muts.append(mutation("pulldown_to_power_source", "return the high-side gate pulldown to S instead of KS",
                             [mv("R1", 2, "VSW")], "R_SERIES", P3))
    else:
        muts.append(mutation("no_gate_pulldown", "drop the high-side gate pulldown", [rm("R1")],
                             "driving_pair", P2))
    muts.append(mutation("low_side_on_bus", "low-side drain on the bus, so no switch node forms",
                         [mv("Q2", PIN_NUMBER[part_type]["D"], "VBUS+")], "skeleton_mismatch", P4))
    return Task(task_id, name, "High Power Stage",
                prompt(f"Task: {pkg} MOSFET half-bridge with 8 decoupling capacitors"
                       + (" and Kelvin-source gate returns." if kelvin else "."),
                       "Ports: VBUS+, VSW, PGND, GATE_H, GATE_L" + (", KS_H, KS_L." if kelvin else "."),
                       f"Parts: {part_type}, R, C."),
                "VBUS+ -> VSW", "48V -> 48V" if "BSC" in part_type else "400V -> 400V",
                f"{part_type} ({'MOSFET' if 'BSC' in part_type else 'SiC FET'})", t,
                b.circuit(task=str(task_id)), muts)


PIN_NUMBER = {
    "IMW65R015M2H": {"G": 1, "D": 2, "S": 3},
    "IMZA65R015M2H": {"D": 1, "S": 2, "KS": 3, "G": 4},
    "IMT65R033M2H": {"G": 1, "KS": 2, "S": 3, "D": 4},
    "IMLT65R015M2H": {"G": 1, "KS": 2, "S": 3, "D": 4},
    "BSC052N08NS5": {"S": 1, "G": 4, "D": 5},
}


def task_13(kg):
    b = Board(kg)
    b.add("U1", "UCC27511", VDD="VCC", GND="GND", INp="PWM", INm="GND", OUTH="OUTH", OUTL="OUTL")
    b.two("R1", "R", "OUTH", "GATE", "4.7").two("R2", "R", "OUTL", "GATE", "2.2")
    b.two("R3", "R", "GATE", "GND", "10k").two("C1", "C", "VCC", "GND", "1u")
    t = template("low_side_driver",
                 {"PWM": "net:PWM", "VCC": "net:VCC", "GATE": "net:GATE", "GND": "net:GND"},
                 [rule("C_DIRECT", "U1.VDD", "U1.GND"), rule("R_SERIES", "U1.OUTH", "net:GATE"),
                  rule("R_SERIES", "U1.OUTL", "net:GATE")])
    muts = [
        mutation("supply_short", "VDD on ground", [mv("U1", 1, "GND")], "supply_pair", P2),
        mutation("no_turn_off_resistor", "drop the turn-off resistor", [rm("R2")], "single_endpoint_net", P1),
    ]
    return Task(13, "Low-side gate driver", "Gate Driver",
                prompt("Task: low-side gate driver with split turn-on and turn-off resistors.",
                       "Ports: PWM, VCC (12 V), GATE, GND.", "Parts: UCC27511, R, C."),
                "PWM, VCC -> GATE", "9V -> 12V", "UCC27511 (Driver)", t, b.circuit(task="13"), muts)


def task_14(kg):
    b = Board(kg)
    b.add("U1", "UCC27211", VDD="VDD", HB="HB", HO="HO_INT", HS="HS", HI="PWM_H", LI="PWM_L",
          VSS="GND", LO="LO_INT")
    b.add("D1", "D", "MURS120", A="VDD", K="HB")
    b.two("C1", "C", "VDD", "GND", "1u").two("C2", "C", "HB", "HS", "220n")
    b.two("R1", "R", "HO_INT", "HO", "4.7").two("R2", "R", "LO_INT", "LO", "4.7")
    t = template("bootstrap_half_bridge_driver",
                 {"PWM_H": "net:PWM_H", "PWM_L": "net:PWM_L", "HO": "net:HO", "LO": "net:LO",
                  "HS": "net:HS", "VDD": "net:VDD", "GND": "net:GND"},
                 [rule("DIODE_FORWARD", "U1.VDD", "U1.HB"), rule("C_DIRECT", "U1.HB", "U1.HS"),
                  rule("C_DIRECT", "U1.VDD", "U1.VSS"), rule("R_SERIES", "U1.HO", "net:HO"),
                  rule("R_SERIES", "U1.LO", "net:LO")],
                 semantic=[{"kind": "primitive_count_at_least", "primitive": "bootstrap_cell", "n": 1}])
    muts = [
        mutation("bootstrap_diode_reversed", "bootstrap diode fitted backwards",
                 [mv("D1", 1, "HB"), mv("D1", 2, "VDD")], "DIODE_FORWARD", P3),
        mutation("no_bootstrap_cap", "drop the bootstrap capacitor", [rm("C2")], "C_DIRECT", P3),
    ]
    return Task(14, "Bootstrap half-bridge driver", "Gate Driver",
                prompt("Task: high-side/low-side bootstrap gate driver with gate resistors.",
                       "Ports: PWM_H, PWM_L, HO, LO, HS, VDD (12 V), GND.", "Parts: UCC27211, D, R, C."),
                "PWM_H, L -> HO, LO", "12V -> 12V", "UCC27211 (HB Driver)", t, b.circuit(task="14"), muts)


def task_15(kg):
    b = Board(kg)
    b.add("U1", "MGJ2D121505SC", VIN_plus="VCC", VIN_minus="GND", VOUT_plus="VISO+", ZERO_V="COM",
          VOUT_minus="VISO-")
    b.add("U2", "UCC5390E", VCC1="VCC", INp="PWM", INm="GND", GND1="GND", VCC2="VISO+", OUT="OUT_INT",
          GND2="COM", VEE2="VISO-")
    b.two("C1", "C", "VCC", "GND", "1u").two("C2", "C", "VISO+", "COM", "1u")
    b.two("C3", "C", "COM", "VISO-", "1u").two("R1", "R", "OUT_INT", "OUT", "4.7")
    t = template("isolated_bipolar_driver",
                 {"PWM": "net:PWM", "VCC": "net:VCC", "OUT": "net:OUT", "COM": "net:COM", "GND": "net:GND"},
                 [rule("C_DIRECT", "U2.VCC1", "U2.GND1"), rule("C_DIRECT", "U2.VCC2", "U2.GND2"),
                  rule("C_DIRECT", "U2.GND2", "U2.VEE2"), rule("R_SERIES", "U2.OUT", "net:OUT")],
                 semantic=[{"kind": "nets_in_distinct_isolation", "a": "PWM", "b": "OUT"}])
    muts = [
        mutation("vee_on_common", "negative rail tied to common", [mv("U2", 8, "COM")], "C_DIRECT", P3),
        mutation("secondary_supply_from_primary", "VCC2 fed from primary ground", [mv("U2", 5, "GND")],
                 "isolation_bridge", P2),
    ]
    return Task(15, "Isolated bipolar gate driver", "Gate Driver",
                prompt("Task: isolated gate driver powered from an isolated +15/-9 V supply.",
                       "Ports: PWM (3.3 V), VCC (12 V), OUT, COM, GND.", "Parts: UCC5390E, MGJ2D121505SC, R, C."),
                "PWM, VCC -> OUT", "3.3V -> 15V/-9V", "UCC5390E (Iso-Driver)", t, b.circuit(task="15"), muts)


def task_16(kg):
    b = Board(kg)
    b.add("U1", "MGJ2D121505SC", VIN_plus="VCC", VIN_minus="GND", VOUT_plus="VISO+", ZERO_V="COM",
          VOUT_minus="VISO-")
    b.add("U2", "UCC21710", OC="OC", COM="COM", OUTH="OUTH_INT", VDD="VISO+", OUTL="OUTL_INT",
          CLMPI="OUT", VEE="VISO-", GND="GND", INp="PWM", INm="GND", FLT="FLT", RST_EN="VCC", VCC="VCC")
    b.two("R1", "R", "OUTH_INT", "OUT", "4.7").two("R2", "R", "OUTL_INT", "OUT", "2.2")
    b.two("R3", "R", "OC", "COM", "10k").two("C4", "C", "OC", "COM", "100p")
    b.two("R4", "R", "FLT", "VCC", "10k")
    b.two("C1", "C", "VCC", "GND", "1u").two("C2", "C", "VISO+", "COM", "1u").two("C3", "C", "COM", "VISO-", "1u")
    t = template("protected_isolated_driver",
                 {"PWM": "net:PWM", "VCC": "net:VCC", "OUT": "net:OUT", "FLT": "net:FLT", "COM": "net:COM",
                  "GND": "net:GND"},
                 [rule("C_DIRECT", "U2.VCC", "U2.GND"), rule("C_DIRECT", "U2.VDD", "U2.COM"),
                  rule("C_DIRECT", "U2.COM", "U2.VEE"), rule("R_SERIES", "U2.OUTH", "net:OUT"),
                  rule("R_SERIES", "U2.OUTL", "net:OUT"), rule("CONNECTED", "U2.CLMPI", "net:OUT"),
                  rule("R_SERIES", "U2.FLT", "U2.VCC")],
                 semantic=[{"kind": "nets_in_distinct_isolation", "a": "PWM", "b": "OUT"}])
    muts = [mutation("clamp_open", "Miller clamp left unconnected", [fl("U2", 7)], "must_be_connected", P2)]
    return Task(16, "Protected isolated gate driver", "Gate Driver",
                prompt("Task: isolated gate driver with overcurrent detection, Miller clamp, fault and enable.",
                       "Ports: PWM (5 V), VCC, OUT, FLT, COM, GND.", "Parts: UCC21710, MGJ2D121505SC, R, C."),
                "PWM, VCC -> OUT, FLT", "5V -> 15V/-9V", "UCC21710 (Iso-Driver)", t, b.circuit(task="16"), muts)


HARD_PROMPT_TAIL = "Gate drivers with separate turn-on/turn-off resistors and isolated supplies per switch."
SIC = "IMZA65R015M2H (SiC FET)"


def control_supply(b: Board, ref="C99"):
    b.two(ref, "C", "VCC", "GND", "10u")


def hard_ports(extra):
    ports = {"VCC": "net:VCC", "GND": "net:GND"}
    ports.update(extra)
    return ports


def leg_rules(n, fet_base):
    out = []
    for k in (0, 2):
        out += drive_rules(f"U{n + k + 1}", f"Q{fet_base + k // 2}", f"U{n + k}")
    return out


def task_17(kg):
    b = Board(kg)
    sic_leg(b, 1, "VIN", "VSW", "PGND", "A", 1)
    b.two("L1", "Inductor_power", "VSW", "VOUT", "100u")
    b.two("C10", "C_film", "VOUT", "PGND", "20u").two("C11", "C_film", "VIN", "PGND", "20u")
    control_supply(b)
    pwm = {"PWM_AH": "net:PWM_AH", "PWM_AL": "net:PWM_AL"}
    t = template("synchronous_buck",
                 hard_ports({"VIN": "net:VIN", "VOUT": "net:VOUT", "PGND": "net:PGND", **pwm}),
                 [rule("C_DIRECT", "net:VIN", "net:PGND"), rule("C_DIRECT", "net:VOUT", "net:PGND"),
                  rule("C_DIRECT", "net:VCC", "net:GND")] + leg_rules(1, 1),
                 sk([("VIN", "port", "VIN"), ("VSW", "switch_node", None), ("VOUT", "port", "VOUT"),
                     ("GND", "port", "PGND")],
                    [("VIN", "VSW", "switch"), ("VSW", "GND", "switch"), ("VSW", "VOUT", "inductor"),
                     ("VOUT", "GND", "capacitor"), ("VIN", "GND", "capacitor")]),
                 [{"kind": "primitive_count_at_least", "primitive": "half_bridge", "n": 1},
                  {"kind": "nets_in_distinct_isolation", "a": "PWM_AH", "b": "VIN"}],
                 POWER_PASSIVES)
    muts = [
        mutation("inductor_from_vin", "output inductor wired from VIN instead of the switch node",
                 [mv("L1", 1, "VIN")], "skeleton_mismatch", P4),
        mutation("low_gate_open", "low-side gate left open", [fl("Q2", 4)], "driving_pair", P2),
        mutation("high_supply_shorted", "high-side isolated supply output shorted to its common",
                 [mv("U1", 7, "KS_AH")], "supply_pair", P2),
    ]
    return Task(17, "Synchronous buck converter", "DC-DC Converter",
                prompt("Task: synchronous buck converter on one SiC half-bridge with LC output filter.",
                       HARD_PROMPT_TAIL, "Ports: VIN (200 V), VOUT (100 V), PGND, PWM_AH, PWM_AL, VCC (12 V), GND.",
                       "Parts: IMZA65R015M2H, UCC5390E, MGJ2D121505SC, Inductor_power, C_film, R, D, C."),
                "VIN, PWM -> VOUT", "200V -> 100V", SIC, t, b.circuit(task="17"), muts)


def task_18(kg):
    b = Board(kg)
    sic_leg(b, 1, "VOUT", "VSW", "PGND", "A", 1)
    b.two("L1", "Inductor_power", "VIN", "VSW", "100u")
    b.two("C10", "C_film", "VOUT", "PGND", "20u").two("C11", "C_film", "VIN", "PGND", "20u")
    control_supply(b)
    t = template("synchronous_boost",
                 hard_ports({"VIN": "net:VIN", "VOUT": "net:VOUT", "PGND": "net:PGND",
                             "PWM_AH": "net:PWM_AH", "PWM_AL": "net:PWM_AL"}),
                 [rule("C_DIRECT", "net:VIN", "net:PGND"), rule("C_DIRECT", "net:VOUT", "net:PGND"),
                  rule("C_DIRECT", "net:VCC", "net:GND")] + leg_rules(1, 1),
                 sk([("VIN", "port", "VIN"), ("VSW", "switch_node", None), ("VOUT", "port", "VOUT"),
                     ("GND", "port", "PGND")],
                    [("VOUT", "VSW", "switch"), ("VSW", "GND", "switch"), ("VIN", "VSW", "inductor"),
                     ("VOUT", "GND", "capacitor"), ("VIN", "GND", "capacitor")]),
                 [{"kind": "primitive_count_at_least", "primitive": "half_bridge", "n": 1}],
                 POWER_PASSIVES)
    muts = [mutation("inductor_to_vout", "input inductor wired to the output rail",
                     [mv("L1", 2, "VOUT")], "skeleton_mismatch", P4)]
    return Task(18, "Synchronous boost converter", "DC-DC Converter",
                prompt("Task: synchronous boost converter on one SiC half-bridge.", HARD_PROMPT_TAIL,
                       "Ports: VIN (100 V), VOUT (200 V), PGND, PWM_AH, PWM_AL, VCC (12 V), GND.",
                       "Parts: IMZA65R015M2H, UCC5390E, MGJ2D121505SC, Inductor_power, C_film, R, D, C."),
                "VIN, PWM -> VOUT", "100V -> 200V", SIC, t, b.circuit(task="18"), muts)


def task_19(kg):
    b = Board(kg)
    sic_leg(b, 1, "VIN", "VSW_A", "PGND", "A", 1)
    sic_leg(b, 5, "VOUT", "VSW_B", "PGND", "B", 3)
    b.two("L1", "Inductor_power", "VSW_A", "VSW_B", "47u")
    b.two("C20", "C_film", "VOUT", "PGND", "20u").two("C21", "C_film", "VIN", "PGND", "20u")
    control_supply(b)
    pwm = {f"PWM_{x}": f"net:PWM_{x}" for x in ("AH", "AL", "BH", "BL")}
    t = template("four_switch_buck_boost",
                 hard_ports({"VIN": "net:VIN", "VOUT": "net:VOUT", "PGND": "net:PGND", **pwm}),
                 [rule("C_DIRECT", "net:VIN", "net:PGND"), rule("C_DIRECT", "net:VOUT", "net:PGND"),
                  rule("C_DIRECT", "net:VCC", "net:GND")] + leg_rules(1, 1) + leg_rules(5, 3),
                 sk([("VIN", "port", "VIN"), ("SWA", "switch_node", None), ("SWB", "switch_node", None),
                     ("VOUT", "port", "VOUT"), ("GND", "port", "PGND")],
                    [("VIN", "SWA", "switch"), ("SWA", "GND", "switch"), ("VOUT", "SWB", "switch"),
                     ("SWB", "GND", "switch"), ("SWA", "SWB", "inductor"),
                     ("VIN", "GND", "capacitor"), ("VOUT", "GND", "capacitor")]),
                 [{"kind": "primitive_count_at_least", "primitive": "half_bridge", "n": 2}],
                 POWER_PASSIVES)
    muts = [mutation("inductor_bypassed", "inductor end moved from VSW_B to VOUT",
                     [mv("L1", 2, "VOUT")], "skeleton_mismatch", P4)]
    return Task(19, "Four-switch buck-boost converter", "DC-DC Converter",
                prompt("Task: 4-switch buck-boost converter from two SiC half-bridges sharing one inductor.",
                       HARD_PROMPT_TAIL, "Ports: VIN (200 V), VOUT (200 V), PGND, PWM_AH/AL/BH/BL, VCC, GND.",
                       "Parts: IMZA65R015M2H, UCC5390E, MGJ2D121505SC, Inductor_power, C_film, R, D, C."),
                "VIN, PWM -> VOUT", "200V -> 200V", SIC, t, b.circuit(task="19"), muts)


def task_20(kg):
    b = Board(kg)
    sic_leg(b, 1, "VIN", "SW_A", "PGND1", "A", 1)
    sic_leg(b, 5, "VIN", "SW_B", "PGND1", "B", 3)
    sic_leg(b, 9, "VOUT", "SW_C", "PGND2", "C", 5)
    sic_leg(b, 13, "VOUT", "SW_D", "PGND2", "D", 7)
    b.two("L1", "Inductor_power", "SW_A", "XA", "20u")
    b.two("C30", "C_film", "SW_B", "XB", "10u")
    b.add("T1", "transformer_PQ5050", Pri_1="XA", Pri_2="XB", Sec_1="SW_C", Sec_2="SW_D")
    b.two("C31", "C_film", "VIN", "PGND1", "20u").two("C32", "C_film", "VOUT", "PGND2", "20u")
    control_supply(b)
    pwm = {f"PWM_{x}{y}": f"net:PWM_{x}{y}" for x in "ABCD" for y in "HL"}
    t = template("dual_active_bridge",
                 hard_ports({"VIN": "net:VIN", "VOUT": "net:VOUT", "PGND1": "net:PGND1",
                             "PGND2": "net:PGND2", **pwm}),
                 [rule("C_DIRECT", "net:VIN", "net:PGND1"), rule("C_DIRECT", "net:VOUT", "net:PGND2"),
                  rule("C_DIRECT", "net:VCC", "net:GND"), rule("DISTINCT", "net:PGND1", "net:PGND2")]
                 + leg_rules(1, 1) + leg_rules(5, 3) + leg_rules(9, 5) + leg_rules(13, 7),
                 sk([("VIN", "port", "VIN"), ("G1", "port", "PGND1"), ("SA", "switch_node", None),
                     ("SB", "switch_node", None), ("XA", "any", None), ("XB", "any", None),
                     ("SC", "switch_node", None), ("SD", "switch_node", None),
                     ("VOUT", "port", "VOUT"), ("G2", "port", "PGND2")],
                    [("VIN", "SA", "switch"), ("SA", "G1", "switch"), ("VIN", "SB", "switch"),
                     ("SB", "G1", "switch"), ("SA", "XA", "inductor"), ("SB", "XB", "capacitor"),
                     ("XA", "XB", "winding"), ("SC", "SD", "winding"), ("XA", "SC", "direct"), ("VOUT", "SC", "switch"),
                     ("SC", "G2", "switch"), ("VOUT", "SD", "switch"), ("SD", "G2", "switch")]),
                 [{"kind": "primitive_count_at_least", "primitive": "half_bridge", "n": 4},
                  {"kind": "primitive_count_at_least", "primitive": "xfmr_link", "n": 1},
                  {"kind": "nets_in_distinct_isolation", "a": "VIN", "b": "VOUT"}],
                 POWER_PASSIVES)
    muts = [mutation("no_blocking_cap", "blocking capacitor shorted out by moving it onto SW_B only",
                     [mv("C30", 2, "SW_B"), mv("T1", 2, "SW_B")], "skeleton_mismatch", P4)]
    return Task(20, "Dual active bridge", "DC-DC Converter",
                prompt("Task: dual active bridge with two SiC full bridges, series inductor, blocking capacitor"
                       " and transformer.", HARD_PROMPT_TAIL,
                       "Ports: VIN (400 V), VOUT (400 V), PGND1, PGND2, PWM_AH..PWM_DL, VCC, GND.",
                       "Parts: IMZA65R015M2H, UCC5390E, MGJ2D121505SC, transformer_PQ5050, Inductor_power,"
                       " C_film, R, D, C."),
                "VIN, PWM -> VSW", "400V -> 400V", SIC, t, b.circuit(task="20"), muts)


def task_21(kg):
    pwm = {f"PWM_{x}{y}": f"net:PWM_{x}{y}" for x in "AB" for y in "HL"}
    t = template("llc_resonant",
                 hard_ports({"VIN": "net:VIN", "VOUT": "net:VOUT", "PGND1": "net:PGND1",
                             "PGND2": "net:PGND2", **pwm}),
                 [rule("C_DIRECT", "net:VIN", "net:PGND1"), rule("C_DIRECT", "net:VOUT", "net:PGND2"),
                  rule("DISTINCT", "net:PGND1", "net:PGND2")],
                 sk([("VIN", "port", "VIN"), ("G1", "port", "PGND1"), ("SA", "switch_node", None),
                     ("SB", "switch_node", None), ("XA", "any", None), ("XB", "any", None),
                     ("S1", "role_class", "xfmr_secondary"), ("S2", "role_class", "xfmr_secondary"),
                     ("VOUT", "port", "VOUT"), ("G2", "port", "PGND2")],
                    [("VIN", "SA", "switch"), ("SA", "G1", "switch"), ("VIN", "SB", "switch"),
                     ("SB", "G1", "switch"), ("SA", "XA", "inductor"), ("SB", "XB", "capacitor"),
                     ("XA", "XB", "winding"), ("S1", "S2", "winding"), ("XA", "S1", "direct"), ("S1", "VOUT", "diode"),
                     ("S2", "VOUT", "diode"), ("G2", "S1", "diode"), ("G2", "S2", "diode"),
                     ("VOUT", "G2", "capacitor")]),
                 [{"kind": "primitive_count_at_least", "primitive": "half_bridge", "n": 2},
                  {"kind": "primitive_count_at_least", "primitive": "xfmr_link", "n": 1},
                  {"kind": "nets_in_distinct_isolation", "a": "VIN", "b": "VOUT"}],
                 POWER_PASSIVES)
    return Task(21, "LLC resonant converter", "DC-DC Converter",
                prompt("Task: LLC resonant converter with isolated transformer output and diode rectifier.",
                       HARD_PROMPT_TAIL, "Ports: VIN (400 V), VOUT (12 V), PGND1, PGND2, PWM_AH..PWM_BL, VCC, GND.",
                       "Parts: IMZA65R015M2H, UCC5390E, MGJ2D121505SC, transformer_PQ5050, Inductor_power,"
                       " C_film, R, D, C."),
                "VIN, PWM -> VSW", "400V -> 12V", SIC, t, None, [],
                parts=["IMZA65R015M2H", "UCC5390E", "MGJ2D121505SC", "transformer_PQ5050", "Inductor_power",
                       "C_film", "R", "D", "C"],
                known_unsatisfied=True)


def task_22(kg):
    b = Board(kg)
    for i, x in enumerate("ABC"):
        sic_leg(b, 1 + 4 * i, "VIN", f"VSW_{x}", "PGND", x, 1 + 2 * i)
    b.two("C20", "C_film", "VIN", "PGND", "20u").two("C21", "C_film", "VIN", "PGND", "20u")
    control_supply(b)
    phases = {f"VSW_{x}": f"net:VSW_{x}" for x in "ABC"}
    pwm = {f"PWM_{x}{y}": f"net:PWM_{x}{y}" for x in "ABC" for y in "HL"}
    t = template("three_phase_inverter",
                 hard_ports({"VIN": "net:VIN", "PGND": "net:PGND", **phases, **pwm}),
                 [rule("C_DIRECT", "net:VIN", "net:PGND", 2), rule("C_DIRECT", "net:VCC", "net:GND")]
                 + leg_rules(1, 1) + leg_rules(5, 3) + leg_rules(9, 5),
                 sk([("VIN", "port", "VIN"), ("GND", "port", "PGND")]
                    + [(f"S{x}", "port", f"VSW_{x}") for x in "ABC"],
                    [e for x in "ABC" for e in (("VIN", f"S{x}", "switch"), (f"S{x}", "GND", "switch"))]
                    + [("VIN", "GND", "capacitor")]),
                 [{"kind": "primitive_count_at_least", "primitive": "half_bridge", "n": 3}],
                 POWER_PASSIVES)
    muts = [mutation("phase_c_high_side_to_gnd", "phase C high-side drain on PGND",
                     [mv("Q5", 1, "PGND")], "skeleton_mismatch", P4)]
    return Task(22, "Three-phase motor drive", "DC-AC Converter",
                prompt("Task: three-phase inverter from three SiC half-bridges on a DC link.", HARD_PROMPT_TAIL,
                       "Ports: VIN (400 V), PGND, VSW_A, VSW_B, VSW_C, PWM_AH..PWM_CL, VCC, GND.",
                       "Parts: IMZA65R015M2H, UCC5390E, MGJ2D121505SC, C_film, R, D, C."),
                "VIN, PWM -> VSW", "400V -> 230V", SIC, t, b.circuit(task="22"), muts)


def task_23(kg):
    b = Board(kg)
    sic_leg(b, 1, "VIN", "SW_A", "PGND", "A", 1)
    sic_leg(b, 5, "VIN", "SW_B", "PGND", "B", 3)
    b.two("L1", "Inductor_power", "SW_A", "AC_L", "1m").two("L2", "Inductor_power", "SW_B", "AC_N", "1m")
    b.two("C20", "C_film", "AC_L", "AC_N", "4.7u").two("C21", "C_film", "VIN", "PGND", "100u")
    control_supply(b)
    pwm = {f"PWM_{x}{y}": f"net:PWM_{x}{y}" for x in "AB" for y in "HL"}
    t = template("single_phase_inverter",
                 hard_ports({"VIN": "net:VIN", "PGND": "net:PGND", "AC_L": "net:AC_L", "AC_N": "net:AC_N", **pwm}),
                 [rule("C_DIRECT", "net:VIN", "net:PGND"), rule("C_DIRECT", "net:AC_L", "net:AC_N"),
                  rule("C_DIRECT", "net:VCC", "net:GND")] + leg_rules(1, 1) + leg_rules(5, 3),
                 sk([("VIN", "port", "VIN"), ("GND", "port", "PGND"), ("SA", "switch_node", None),
                     ("SB", "switch_node", None), ("L", "port", "AC_L"), ("N", "port", "AC_N")],
                    [("VIN", "SA", "switch"), ("SA", "GND", "switch"), ("VIN", "SB", "switch"),
                     ("SB", "GND", "switch"), ("SA", "L", "inductor"), ("SB", "N", "inductor"),
                     ("L", "N", "capacitor"), ("VIN", "GND", "capacitor")]),
                 [{"kind": "primitive_count_at_least", "primitive": "half_bridge", "n": 2}],
                 POWER_PASSIVES)
    muts = [mutation("filter_inductor_on_bus", "line inductor fed from the DC bus instead of SW_A",
                     [mv("L1", 1, "VIN")], "skeleton_mismatch", P4)]
    return Task(23, "Single-phase grid-tied inverter", "DC-AC Converter",
                prompt("Task: single-phase full-bridge inverter with LC output filter.", HARD_PROMPT_TAIL,
                       "Ports: VIN (400 V), PGND, AC_L, AC_N, PWM_AH..PWM_BL, VCC, GND.",
                       "Parts: IMZA65R015M2H, UCC5390E, MGJ2D121505SC, Inductor_power, C_film, R, D, C."),
                "VIN, PWM -> VSW", "400V -> 230V", SIC, t, b.circuit(task="23"), muts)


def all_tasks(kg) -> list[Task]:
    return [
        task_1(kg), task_2(kg), task_3(kg), task_4(kg), task_5(kg), task_6(kg), task_7(kg),
        power_stage(kg, 8, "IMW65R015M2H", "TO-247-3 half-bridge", "TO-247-3", kelvin=False),
        power_stage(kg, 9, "IMZA65R015M2H", "TO-247-4 Kelvin half-bridge", "TO-247-4", kelvin=True),
        power_stage(kg, 10, "IMT65R033M2H", "TOLL Kelvin half-bridge", "TOLL", kelvin=True),
        power_stage(kg, 11, "IMLT65R015M2H", "TOLT Kelvin half-bridge", "TOLT", kelvin=True),
        power_stage(kg, 12, "BSC052N08NS5", "QFN half-bridge power stage", "SuperSO8", kelvin=False),
        task_13(kg), task_14(kg), task_15(kg), task_16(kg),
        task_17(kg), task_18(kg), task_19(kg), task_20(kg), task_21(kg), task_22(kg), task_23(kg),
    ]


# -- writing -------------------------------------------------------------------------


def write_corpus(out: Path) -> list[int]:
    kg_doc = build_kg_doc()
    kg = kg_from_doc(kg_doc)
    (out / "kg").mkdir(parents=True, exist_ok=True)
    (out / "kg" / "kg_components.json").write_bytes(serialize_kg(kg))
    tasks_dir = out / "tasks"
    if tasks_dir.exists():
        shutil.rmtree(tasks_dir)
    written = []
    for t in all_tasks(kg_doc):
        d = tasks_dir / str(t.id)
        (d / "mutations").mkdir(parents=True)
        (d / "template.json").write_bytes(serialize_template(template_from_doc(t.template)))
        doc = {
            "id": t.id, "name": t.name, "difficulty": difficulty_of(t.id), "type": t.type,
            "prompt_payload": t.prompt, "feedback_level": "full",
            "attributes": {"io_nodes": t.io_nodes, "vi_level": t.vi_level, "key_components": t.key_components},
            "mutations": t.mutations,
        }
        if t.parts:
            doc["parts"] = t.parts
        if t.known_unsatisfied:
            doc["known_unsatisfied"] = True
        (d / "task.json").write_bytes(_jsonfmt.dump_bytes(doc))
        if t.golden is not None:
            (d / "golden.circuit.json").write_bytes(serialize_circuit(t.golden))
            for m in t.mutations:
                mutated = apply_edits(t.golden, m["edits"])
                (d / "mutations" / f"{m['name']}.circuit.json").write_bytes(serialize_circuit(mutated))
        else:
            (d / "mutations").rmdir()
        written.append(t.id)
    return written


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", type=Path, default=DEFAULT_OUT)
    args = ap.parse_args()
    ids = write_corpus(args.out)
    kg = kg_from_doc(build_kg_doc())
    diags = lint_kg(kg)
    for dg in diags:
        print(f"lint: {dg.message}")
    print(f"KG: {len(kg.entries)} parts, mean token footprint {mean_footprint(kg):.1f}")
    bad = 0
    for i in ids:
        bundle = load_bundle(i, args.out, check=False)
        problems = check_bundle(bundle)
        status = "ok" if not problems else "FAIL"
        print(f"task {i:2d} {status}  golden={'yes' if bundle.golden else 'no '}  mutations={len(bundle.mutations)}")
        for p in problems:
            print(f"    {p}")
        bad += bool(problems)
    return 1 if bad or diags else 0


if __name__ == "__main__":
    sys.exit(main())
