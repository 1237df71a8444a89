package com.demo.os;

public class SystemService {
    private ServiceRegistry registry;
    private PowerManager power;

    public void boot(String mode) {
        registry.startAll(mode);
        power.setState("running");
        Watchdog.arm(registry.size() * 1000);
    }

    public void shutdown() {
        registry.stopAll();
        power.setState("halted");
        Watchdog.disarm();
    }

    public void reboot(String reason) {
        shutdown();
        BootLog.write("reboot: " + reason);
        power.cycle();
    }
}
