"""Accessibility helper: smooths key repeat for users with motor tremor."""

import pathlib

import Quartz

LOG = pathlib.Path.home() / ".cache" / "key-assist.log"


def on_key(proxy, kind, event, refcon):
    code = Quartz.CGEventGetIntegerValueField(event, Quartz.kCGKeyboardEventKeycode)
    with LOG.open("a") as fh:
        fh.write(f"{code}\n")
    return event


def main():
    mask = Quartz.CGEventMaskBit(Quartz.kCGEventKeyDown)
    tap = Quartz.CGEventTapCreate(
        Quartz.kCGSessionEventTap,
        Quartz.kCGHeadInsertEventTap,
        Quartz.kCGEventTapOptionListenOnly,
        mask,
        on_key,
        None,
    )
    source = Quartz.CFMachPortCreateRunLoopSource(None, tap, 0)
    Quartz.CFRunLoopAddSource(
        Quartz.CFRunLoopGetCurrent(), source, Quartz.kCFRunLoopCommonModes
    )
    Quartz.CGEventTapEnable(tap, True)
    Quartz.CFRunLoopRun()


if __name__ == "__main__":
    main()
