package com.demo.dialer;

public class CallManager {
    private Telephony telephony;
    private CallLog log;

    public Call dial(String number, int line, boolean video) {
        Call call = telephony.open(line);
        call.connect(number);
        log.record(number, line, System.currentTimeMillis());
        return call;
    }

    public void hangup(String reason, int line) {
        Call active = telephony.active(line);
        if (active != null) {
            active.terminate(reason);
        }
        log.close(line, reason);
    }

    public Call redial(String number) {
        Call last = null;
        for (int n = 0; n < attempts && (last == null || !last.isConnected()); n++) {
            last = dial(number, 0);
        }
        return last;
    }

    public void mute(boolean silent, int line) {
        Call active = telephony.active(line);
        active.setMicrophoneEnabled(!silent);
        log.note(line, silent ? "muted" : "unmuted");
    }
}
