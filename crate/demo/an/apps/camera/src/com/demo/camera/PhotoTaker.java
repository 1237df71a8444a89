package com.demo.camera;

class PhotoTaker {

    public Photo takePhoto(int width, int height) {
        Frame frame = sensor.capture(width, height);
        frame.applyWhiteBalance(sensor.temperature());
        Photo photo = new Photo(frame.pixels(), width, height);
        photo.setTimestamp(System.currentTimeMillis());
        return photo;
    }
}
